//! Surfaces presented as oriented polygons glued along ports.
//!
//! Every polygon lists its boundary anticlockwise as an alternating cycle of vertices and
//! edges; item position `2i` is vertex `i` and `2i + 1` is edge `i`, which runs from vertex
//! `i` to vertex `i + 1`. Two glued ports are traversed in opposite directions.
//! Curves are walks: the sequence of ports they leave through, plus terminal vertex
//! occurrences for arcs.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Mark {
    Circ(usize),
    Bullet(usize),
    Aux(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    Port(usize),
    Bd,
    Cut,
}

impl Side {
    pub fn is_boundary(self) -> bool {
        !matches!(self, Side::Port(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Poly {
    pub verts: Vec<Mark>,
    pub edges: Vec<Side>,
}

impl Poly {
    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    /// Number of items (vertices plus edges).
    pub fn items(&self) -> usize {
        2 * self.verts.len()
    }
}

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum CellError {
    #[error("contractible")]
    Contractible,
    #[error("malformed walk: {0}")]
    Malformed(String),
    #[error("corrupt surface: {0}")]
    Corrupt(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Walk {
    pub closed: bool,
    /// (polygon, vertex index) of the first and last point of an arc.
    pub start: (usize, usize),
    pub end: (usize, usize),
    pub ports: Vec<usize>,
}

impl Walk {
    pub fn closed(ports: Vec<usize>) -> Self {
        Walk { closed: true, start: (0, 0), end: (0, 0), ports }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Visit {
    pub poly: usize,
    pub entry: usize,
    pub exit: usize,
}

/// A germ: one end of an arc, read as a strand leaving its endpoint.
#[derive(Debug, Clone)]
pub struct Germ {
    pub mark: Mark,
    /// Position of the occurrence in the anticlockwise chain at `mark`.
    pub occurrence: usize,
    pub visits: Vec<Visit>,
}

/// An interior crossing found between two walks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hit {
    pub a_visit: usize,
    pub b_visit: usize,
    pub b_reversed: bool,
    pub len: usize,
    /// For shared runs: `a` lies to the right of `b` where the run begins.
    pub a_right: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Invariants {
    pub components: usize,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler: i64,
    pub boundary_cycles: usize,
    pub punctures: usize,
    pub genus: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellSurface {
    pub polys: Vec<Poly>,
    pub glue: Vec<usize>,
    pub loc: Vec<(usize, usize)>,
}

pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let n = self.parent[y];
            self.parent[y] = r;
            y = n;
        }
        r
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

fn rel(x: usize, base: usize, n2: usize) -> usize {
    (x + n2 - base) % n2
}

impl CellSurface {
    /// Build from polygons whose ports are numbered `0..2k` with `glue` an involution.
    pub fn new(polys: Vec<Poly>, glue: Vec<usize>) -> Result<Self, CellError> {
        let mut loc = vec![(usize::MAX, usize::MAX); glue.len()];
        for (p, poly) in polys.iter().enumerate() {
            if poly.verts.len() != poly.edges.len() || poly.verts.is_empty() {
                return Err(CellError::Corrupt(format!("polygon {p} is not alternating")));
            }
            for (e, side) in poly.edges.iter().enumerate() {
                if let Side::Port(h) = *side {
                    if h >= glue.len() || loc[h].0 != usize::MAX {
                        return Err(CellError::Corrupt(format!("port {h} misplaced")));
                    }
                    loc[h] = (p, e);
                }
            }
        }
        for (h, &g) in glue.iter().enumerate() {
            if loc[h].0 == usize::MAX || g >= glue.len() || glue[g] != h || g == h {
                return Err(CellError::Corrupt(format!("port {h} is not glued properly")));
            }
        }
        Ok(CellSurface { polys, glue, loc })
    }

    /// Replace vertex labels by their classes under the gluing. A class becomes a `Circ`
    /// if it contains a `Circ`, else a `Bullet` if it contains one, else `Aux`. Classes
    /// are numbered per kind in order of first occurrence.
    pub fn relabel(&mut self) {
        let offsets: Vec<usize> = self
            .polys
            .iter()
            .scan(0, |acc, p| {
                let o = *acc;
                *acc += p.len();
                Some(o)
            })
            .collect();
        let total: usize = self.polys.iter().map(|p| p.len()).sum();
        let mut dsu = Dsu::new(total);
        for h in 0..self.glue.len() {
            let g = self.glue[h];
            if h > g {
                continue;
            }
            let (p, e) = self.loc[h];
            let (q, f) = self.loc[g];
            let (np, nq) = (self.polys[p].len(), self.polys[q].len());
            dsu.union(offsets[p] + e, offsets[q] + (f + 1) % nq);
            dsu.union(offsets[p] + (e + 1) % np, offsets[q] + f);
        }
        let mut kind: BTreeMap<usize, u8> = BTreeMap::new();
        for (p, poly) in self.polys.iter().enumerate() {
            for (i, m) in poly.verts.iter().enumerate() {
                let r = dsu.find(offsets[p] + i);
                let k = match m {
                    Mark::Circ(_) => 0,
                    Mark::Bullet(_) => 1,
                    Mark::Aux(_) => 2,
                };
                let e = kind.entry(r).or_insert(k);
                *e = (*e).min(k);
            }
        }
        let mut names: BTreeMap<usize, Mark> = BTreeMap::new();
        let mut counts = [0usize; 3];
        for p in 0..self.polys.len() {
            for i in 0..self.polys[p].len() {
                let r = dsu.find(offsets[p] + i);
                if names.contains_key(&r) {
                    continue;
                }
                let k = kind[&r] as usize;
                let m = match k {
                    0 => Mark::Circ(counts[0]),
                    1 => Mark::Bullet(counts[1]),
                    _ => Mark::Aux(counts[2]),
                };
                counts[k] += 1;
                names.insert(r, m);
            }
        }
        for p in 0..self.polys.len() {
            for i in 0..self.polys[p].len() {
                let r = dsu.find(offsets[p] + i);
                self.polys[p].verts[i] = names[&r];
            }
        }
    }

    /// Glued ports must identify equally labelled vertices.
    pub fn check(&self) -> Result<(), CellError> {
        for h in 0..self.glue.len() {
            let (p, e) = self.loc[h];
            let (q, f) = self.loc[self.glue[h]];
            let (pp, qq) = (&self.polys[p], &self.polys[q]);
            if pp.verts[e] != qq.verts[(f + 1) % qq.len()] || pp.verts[(e + 1) % pp.len()] != qq.verts[f] {
                return Err(CellError::Corrupt(format!("port {h} joins differently labelled vertices")));
            }
        }
        Ok(())
    }

    pub fn marks(&self) -> Vec<Mark> {
        let mut ms: Vec<Mark> = self.polys.iter().flat_map(|p| p.verts.iter().copied()).collect();
        ms.sort();
        ms.dedup();
        ms
    }

    /// Marks that touch a boundary or cut edge.
    pub fn boundary_marks(&self) -> Vec<Mark> {
        let mut ms = Vec::new();
        for p in &self.polys {
            let n = p.len();
            for (e, s) in p.edges.iter().enumerate() {
                if s.is_boundary() {
                    ms.push(p.verts[e]);
                    ms.push(p.verts[(e + 1) % n]);
                }
            }
        }
        ms.sort();
        ms.dedup();
        ms
    }

    pub fn component_of_polys(&self) -> Vec<usize> {
        let mut dsu = Dsu::new(self.polys.len());
        for h in 0..self.glue.len() {
            dsu.union(self.loc[h].0, self.loc[self.glue[h]].0);
        }
        let mut ids = BTreeMap::new();
        (0..self.polys.len())
            .map(|p| {
                let r = dsu.find(p);
                let k = ids.len();
                *ids.entry(r).or_insert(k)
            })
            .collect()
    }

    /// Euler data per connected component.
    pub fn invariants(&self) -> Vec<Invariants> {
        let comp = self.component_of_polys();
        let nc = comp.iter().copied().max().map_or(0, |m| m + 1);
        let marks = self.marks();
        let midx: BTreeMap<Mark, usize> = marks.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let bmarks = self.boundary_marks();
        let mut mark_comp = vec![usize::MAX; marks.len()];
        let mut out: Vec<Invariants> = (0..nc)
            .map(|_| Invariants {
                components: 1,
                vertices: 0,
                edges: 0,
                faces: 0,
                euler: 0,
                boundary_cycles: 0,
                punctures: 0,
                genus: 0,
            })
            .collect();
        let mut dsu = Dsu::new(marks.len());
        for (p, poly) in self.polys.iter().enumerate() {
            let c = comp[p];
            out[c].faces += 1;
            let n = poly.len();
            for (e, s) in poly.edges.iter().enumerate() {
                match s {
                    Side::Port(_) => out[c].edges += 1,
                    _ => {
                        out[c].edges += 2;
                        dsu.union(midx[&poly.verts[e]], midx[&poly.verts[(e + 1) % n]]);
                    }
                }
            }
            for m in &poly.verts {
                mark_comp[midx[m]] = c;
            }
        }
        let mut roots = std::collections::BTreeSet::new();
        for (i, m) in marks.iter().enumerate() {
            let c = mark_comp[i];
            out[c].vertices += 1;
            if bmarks.binary_search(m).is_ok() {
                if roots.insert(dsu.find(i)) {
                    out[c].boundary_cycles += 1;
                }
            } else {
                out[c].punctures += 1;
            }
        }
        for inv in &mut out {
            inv.edges /= 2;
            inv.euler = inv.vertices as i64 - inv.edges as i64 + inv.faces as i64;
            inv.genus = (2 - inv.euler - inv.boundary_cycles as i64) / 2;
        }
        out
    }

    pub fn port_pos(&self, h: usize) -> usize {
        2 * self.loc[h].1 + 1
    }

    pub fn poly_of(&self, h: usize) -> usize {
        self.loc[h].0
    }

    pub fn visits(&self, w: &Walk) -> Result<Vec<Visit>, CellError> {
        let k = w.ports.len();
        let mut out = Vec::with_capacity(k + 1);
        if w.closed {
            if k == 0 {
                return Err(CellError::Contractible);
            }
            for i in 0..k {
                let g = self.glue[w.ports[(i + k - 1) % k]];
                let h = w.ports[i];
                if self.poly_of(g) != self.poly_of(h) {
                    return Err(CellError::Malformed(format!("ports {g} and {h} lie in different polygons")));
                }
                out.push(Visit { poly: self.poly_of(h), entry: self.port_pos(g), exit: self.port_pos(h) });
            }
            return Ok(out);
        }
        let mut poly = w.start.0;
        let mut entry = 2 * w.start.1;
        for &h in &w.ports {
            if self.poly_of(h) != poly {
                return Err(CellError::Malformed(format!("port {h} does not lie in polygon {poly}")));
            }
            out.push(Visit { poly, entry, exit: self.port_pos(h) });
            let g = self.glue[h];
            poly = self.poly_of(g);
            entry = self.port_pos(g);
        }
        if poly != w.end.0 {
            return Err(CellError::Malformed("walk does not reach its end polygon".into()));
        }
        out.push(Visit { poly, entry, exit: 2 * w.end.1 });
        Ok(out)
    }

    pub fn reverse(&self, w: &Walk) -> Walk {
        Walk {
            closed: w.closed,
            start: w.end,
            end: w.start,
            ports: w.ports.iter().rev().map(|&h| self.glue[h]).collect(),
        }
    }

    /// The vertex occurrence across port `h` that matches vertex `v` of `h`'s polygon.
    fn across(&self, h: usize, v: usize) -> (usize, usize) {
        let (p, e) = self.loc[h];
        let n = self.polys[p].len();
        let (q, f) = self.loc[self.glue[h]];
        let m = self.polys[q].len();
        if v == e {
            (q, (f + 1) % m)
        } else {
            debug_assert_eq!(v, (e + 1) % n);
            (q, f)
        }
    }

    fn adjacent(&self, occ: (usize, usize), h: usize) -> bool {
        let (p, e) = self.loc[h];
        let n = self.polys[p].len();
        p == occ.0 && (occ.1 == e || occ.1 == (e + 1) % n)
    }

    /// Cancel backtracks and slide terminal runs along edges at the endpoints.
    pub fn reduce(&self, w: &Walk) -> Result<Walk, CellError> {
        self.reduce_tracked(w).map(|(w, _)| w)
    }

    /// As [`CellSurface::reduce`], also returning the original index of every surviving
    /// port.
    pub fn reduce_tracked(&self, w: &Walk) -> Result<(Walk, Vec<usize>), CellError> {
        let mut ports: Vec<(usize, usize)> = Vec::with_capacity(w.ports.len());
        for (i, &h) in w.ports.iter().enumerate() {
            if ports.last().is_some_and(|&(q, _)| self.glue[q] == h) {
                ports.pop();
            } else {
                ports.push((h, i));
            }
        }
        let split = |v: &[(usize, usize)]| -> (Vec<usize>, Vec<usize>) { v.iter().copied().unzip() };
        if w.closed {
            let mut lo = 0;
            while ports.len() - lo >= 2 && self.glue[ports.last().unwrap().0] == ports[lo].0 {
                ports.pop();
                lo += 1;
            }
            let (ports, idx) = split(&ports[lo..]);
            if ports.is_empty() {
                return Err(CellError::Contractible);
            }
            let out = Walk::closed(ports);
            self.visits(&out)?;
            return Ok((out, idx));
        }
        let mut start = w.start;
        let mut end = w.end;
        let mut lo = 0;
        loop {
            let mut moved = false;
            if lo < ports.len() && self.adjacent(start, ports[lo].0) {
                start = self.across(ports[lo].0, start.1);
                lo += 1;
                moved = true;
            }
            if lo < ports.len() {
                let last = self.glue[ports.last().unwrap().0];
                if self.adjacent(end, last) {
                    end = self.across(last, end.1);
                    ports.pop();
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
        let (ports, idx) = split(&ports[lo..]);
        if ports.is_empty() && start == end {
            return Err(CellError::Contractible);
        }
        let out = Walk { closed: false, start, end, ports };
        self.visits(&out)?;
        Ok((out, idx))
    }

    /// Representative independent of orientation and, for closed walks, of rotation.
    pub fn canonical(&self, w: &Walk) -> Walk {
        let r = self.reverse(w);
        if !w.closed {
            let mut best = std::cmp::min(w.clone(), r);
            if let Some(alt) = self.across_side(w) {
                best = best.min(self.reverse(&alt)).min(alt);
            }
            return best;
        }
        let mut best = w.clone();
        for cand in [w, &r] {
            for s in 0..cand.ports.len() {
                let mut p = cand.ports.clone();
                p.rotate_left(s);
                let c = Walk::closed(p);
                if c < best {
                    best = c;
                }
            }
        }
        best
    }

    /// A port-free arc between the two ends of a glued side, drawn in the polygon on the
    /// other side.
    fn across_side(&self, w: &Walk) -> Option<Walk> {
        if !w.ports.is_empty() || w.start.0 != w.end.0 {
            return None;
        }
        let p = w.start.0;
        let n = self.polys[p].len();
        let (a, b) = (w.start.1, w.end.1);
        let e = if (a + 1) % n == b {
            a
        } else if (b + 1) % n == a {
            b
        } else {
            return None;
        };
        let Side::Port(h) = self.polys[p].edges[e] else { return None };
        Some(Walk { closed: false, start: self.across(h, a), end: self.across(h, b), ports: vec![] })
    }

    /// Primitive root of a closed walk and the power it is raised to.
    pub fn root(&self, w: &Walk) -> (Walk, usize) {
        let k = w.ports.len();
        if !w.closed {
            return (w.clone(), 1);
        }
        for p in 1..=k {
            if k % p == 0 && (0..k).all(|i| w.ports[i] == w.ports[(i + p) % k]) {
                return (Walk::closed(w.ports[..p].to_vec()), k / p);
            }
        }
        unreachable!()
    }

    pub fn same_curve(&self, a: &Walk, b: &Walk) -> bool {
        a.closed == b.closed && self.canonical(a) == self.canonical(b)
    }

    fn exit_is_vertex(x: usize) -> bool {
        x % 2 == 0
    }

    /// Crossings found by aligning visits of `a` with visits of `b` (already oriented).
    fn pass(
        &self,
        va: &[Visit],
        a_closed: bool,
        vb: &[Visit],
        b_closed: bool,
        skip_diagonal: bool,
        min_len: usize,
        b_reversed: bool,
    ) -> Vec<Hit> {
        let (ka, kb) = (va.len(), vb.len());
        let bound = ka + kb + 2;
        let mut hits = Vec::new();
        for i in 0..ka {
            for j in 0..kb {
                if skip_diagonal && i == j {
                    continue;
                }
                let (x, y) = (va[i], vb[j]);
                if x.poly != y.poly {
                    continue;
                }
                let n2 = self.polys[x.poly].items();
                if x.entry == y.entry && !Self::exit_is_vertex(x.entry) {
                    continue;
                }
                // extend along shared exits
                let mut len = 0;
                let mut ok = true;
                loop {
                    let ia = i + len;
                    let jb = j + len;
                    if (!a_closed && ia >= ka) || (!b_closed && jb >= kb) {
                        ok = false;
                        break;
                    }
                    let (u, v) = (va[ia % ka], vb[jb % kb]);
                    if u.exit != v.exit || Self::exit_is_vertex(u.exit) {
                        break;
                    }
                    len += 1;
                    if len > bound {
                        ok = false;
                        break;
                    }
                }
                if !ok || len < min_len {
                    continue;
                }
                let ue = va[(i + len) % ka];
                let ve = vb[(j + len) % kb];
                if len == 0 {
                    let pts = [x.entry, x.exit, y.entry, y.exit];
                    if pts[0] == pts[2] || pts[0] == pts[3] || pts[1] == pts[2] || pts[1] == pts[3] {
                        continue;
                    }
                    let between = |p: usize, lo: usize, hi: usize| {
                        let d = rel(p, lo, n2);
                        d > 0 && d < rel(hi, lo, n2)
                    };
                    if between(y.entry, x.entry, x.exit) != between(y.exit, x.entry, x.exit) {
                        hits.push(Hit { a_visit: i, b_visit: j, b_reversed, len: 0, a_right: false });
                    }
                    continue;
                }
                if x.entry == y.entry || ue.exit == ve.exit {
                    continue;
                }
                let ns = n2;
                let ne = self.polys[ue.poly].items();
                let rs_a = rel(x.entry, x.exit, ns);
                let rs_b = rel(y.entry, x.exit, ns);
                let re_a = rel(ue.exit, ue.entry, ne);
                let re_b = rel(ve.exit, ue.entry, ne);
                if (rs_a < rs_b) == (re_a < re_b) {
                    hits.push(Hit { a_visit: i, b_visit: j, b_reversed, len, a_right: rs_a > rs_b });
                }
            }
        }
        hits
    }

    /// All interior crossings of `a` and `b`. When `same` is set the two walks are the
    /// same curve and every crossing is reported twice, once per ordered pair of strands.
    pub fn interior_hits(&self, a: &Walk, b: &Walk, same: bool) -> Result<Vec<Hit>, CellError> {
        let va = self.visits(a)?;
        let vb = self.visits(b)?;
        let br = self.reverse(b);
        let vbr = self.visits(&br)?;
        let mut hits = self.pass(&va, a.closed, &vb, b.closed, same, 0, false);
        hits.extend(self.pass(&va, a.closed, &vbr, b.closed, false, 1, true));
        Ok(hits)
    }

    pub fn interior_count(&self, a: &Walk, b: &Walk) -> Result<usize, CellError> {
        Ok(self.interior_hits(a, b, false)?.len())
    }

    pub fn self_crossings(&self, a: &Walk) -> Result<usize, CellError> {
        let n = self.interior_hits(a, a, true)?.len();
        debug_assert!(n % 2 == 0);
        Ok(n / 2)
    }

    /// Anticlockwise chain of occurrences of a vertex label.
    pub fn occurrences(&self, m: Mark) -> Vec<(usize, usize)> {
        let all: Vec<(usize, usize)> = self
            .polys
            .iter()
            .enumerate()
            .flat_map(|(p, poly)| {
                poly.verts.iter().enumerate().filter(move |(_, v)| **v == m).map(move |(i, _)| (p, i))
            })
            .collect();
        let prev_edge = |(p, i): (usize, usize)| {
            let n = self.polys[p].len();
            self.polys[p].edges[(i + n - 1) % n]
        };
        let first = all.iter().copied().find(|&(p, i)| self.polys[p].edges[i].is_boundary());
        let Some(mut cur) = first.or(all.first().copied()) else {
            return vec![];
        };
        let mut chain = vec![cur];
        loop {
            match prev_edge(cur) {
                Side::Port(h) => {
                    let g = self.glue[h];
                    let next = (self.poly_of(g), self.loc[g].1);
                    if next == chain[0] || chain.len() > all.len() {
                        break;
                    }
                    chain.push(next);
                    cur = next;
                }
                _ => break,
            }
        }
        chain
    }

    /// Germs of an arc at its two ends: (start germ, end germ).
    pub fn germs(&self, w: &Walk) -> Result<(Germ, Germ), CellError> {
        let mk = |walk: &Walk| -> Result<Germ, CellError> {
            let (p, i) = walk.start;
            let mark = self.polys[p].verts[i];
            let occurrence = self
                .occurrences(mark)
                .iter()
                .position(|&o| o == (p, i))
                .ok_or_else(|| CellError::Corrupt("occurrence chain misses a vertex".into()))?;
            Ok(Germ { mark, occurrence, visits: self.visits(walk)? })
        };
        Ok((mk(w)?, mk(&self.reverse(w))?))
    }

    /// Compare two strands that sit in the same polygon at the same entry.
    pub fn strand_order(&self, a: &[Visit], b: &[Visit]) -> Ordering {
        let mut k = 0;
        loop {
            let (Some(u), Some(v)) = (a.get(k), b.get(k)) else {
                return a.len().cmp(&b.len());
            };
            debug_assert_eq!((u.poly, u.entry), (v.poly, v.entry));
            if u.exit != v.exit {
                let n2 = self.polys[u.poly].items();
                return rel(u.exit, u.entry, n2).cmp(&rel(v.exit, u.entry, n2));
            }
            if Self::exit_is_vertex(u.exit) {
                return Ordering::Equal;
            }
            k += 1;
        }
    }

    /// Anticlockwise order of two germs at the same mark.
    pub fn germ_order(&self, a: &Germ, b: &Germ) -> Ordering {
        debug_assert_eq!(a.mark, b.mark);
        a.occurrence.cmp(&b.occurrence).then_with(|| self.strand_order(&a.visits, &b.visits))
    }

    /// Pairs of ends where an end of `b` follows an end of `a` anticlockwise at a common
    /// endpoint. End index 0 is the start of the walk, 1 its end.
    pub fn boundary_pairs(&self, a: &Walk, b: &Walk) -> Result<Vec<(usize, usize, Mark)>, CellError> {
        if a.closed || b.closed {
            return Ok(vec![]);
        }
        let (a0, a1) = self.germs(a)?;
        let (b0, b1) = self.germs(b)?;
        let mut out = Vec::new();
        for (ia, ga) in [a0, a1].iter().enumerate() {
            for (ib, gb) in [&b0, &b1].iter().enumerate() {
                if ga.mark == gb.mark && self.germ_order(ga, gb) == Ordering::Less {
                    out.push((ia, ib, ga.mark));
                }
            }
        }
        Ok(out)
    }

    /// Whether an arc starts and ends at the same mark.
    pub fn is_loop(&self, w: &Walk) -> bool {
        !w.closed && self.polys[w.start.0].verts[w.start.1] == self.polys[w.end.0].verts[w.end.1]
    }

    pub fn endpoints(&self, w: &Walk) -> Option<(Mark, Mark)> {
        if w.closed {
            None
        } else {
            Some((self.polys[w.start.0].verts[w.start.1], self.polys[w.end.0].verts[w.end.1]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A square with two opposite sides glued: an annulus with one marked point per
    /// boundary circle.
    fn annulus() -> CellSurface {
        let poly = Poly {
            verts: vec![Mark::Circ(0), Mark::Circ(0), Mark::Circ(1), Mark::Circ(1)],
            edges: vec![Side::Bd, Side::Port(0), Side::Bd, Side::Port(1)],
        };
        let mut s = CellSurface::new(vec![poly], vec![1, 0]).unwrap();
        s.relabel();
        s.check().unwrap();
        s
    }

    #[test]
    fn annulus_invariants() {
        let s = annulus();
        let inv = &s.invariants()[0];
        assert_eq!(inv.euler, 0);
        assert_eq!(inv.boundary_cycles, 2);
        assert_eq!(inv.genus, 0);
    }

    #[test]
    fn backtrack_cancels_and_core_is_closed() {
        let s = annulus();
        let w = Walk { closed: false, start: (0, 0), end: (0, 2), ports: vec![1, 0] };
        let r = s.reduce(&w).unwrap();
        assert!(r.ports.is_empty());
        let core = Walk::closed(vec![0]);
        assert_eq!(s.reduce(&core).unwrap(), core);
        assert_eq!(s.reduce(&Walk::closed(vec![0, 1])), Err(CellError::Contractible));
        assert_eq!(s.root(&Walk::closed(vec![0, 0, 0])).1, 3);
    }
}
