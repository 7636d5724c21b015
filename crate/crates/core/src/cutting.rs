//! Cutting a cell surface along pairwise disjoint arcs.
//!
//! Each polygon is split along the chords the arcs draw through it. Ports are subdivided
//! at the crossing points, so glued halves stay glued piece by piece. In contracting mode
//! every chord collapses to a single new vertex, one per side of each arc; in open mode
//! chords become `Cut` edges and crossing points become `Aux` vertices.
//!
//! Further walks ("riders") that avoid the arcs are carried over to the result.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::cells::{CellError, CellSurface, Mark, Poly, Side, Visit, Walk};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Contract each side of cut `i` to `copies[i].0` (left) or `copies[i].1` (right).
    Contract,
    /// Keep the cut edges; crossing points become `Aux(first_aux + k)`.
    Open { first_aux: usize },
}

#[derive(Debug, Clone)]
pub struct CutOutput {
    pub surface: CellSurface,
    /// Riders carried over, not yet reduced; `None` when a rider crosses a cut.
    pub riders: Vec<Option<Walk>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Point {
    Vertex(usize),
    /// The `j`-th cut point along half-edge `h`.
    Cross(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Elem {
    /// Boundary piece of a polygon from refined point `k` to `k + 1`.
    Piece(usize),
    /// Chord `c` traversed forwards (along its arc) or backwards.
    Chord(usize, bool),
}

struct Chord {
    cut: usize,
    a: usize,
    b: usize,
}

struct Refined {
    points: Vec<Point>,
    index: BTreeMap<Point, usize>,
    chords: Vec<Chord>,
    /// For every point, incident chords as (other point, chord id).
    incident: Vec<Vec<(usize, usize)>>,
}

struct Strands<'a> {
    s: &'a CellSurface,
    walks: Vec<&'a Walk>,
    fwd: Vec<Vec<Visit>>,
    bwd: Vec<Vec<Visit>>,
}

impl Strands<'_> {
    /// The walk's visits from crossing `t` on, oriented to enter the polygon of `into`.
    fn ray(&self, w: usize, t: usize, into: usize) -> Vec<Visit> {
        let walk = self.walks[w];
        let k = walk.ports.len();
        let (vis, t) = if self.s.glue[walk.ports[t]] == into { (&self.fwd[w], t) } else { (&self.bwd[w], k - 1 - t) };
        if walk.closed {
            (0..2 * k + 2).map(|i| vis[(t + 1 + i) % k]).collect()
        } else {
            vis[t + 1..].to_vec()
        }
    }

    /// Order of two strands along half-edge `h`, from its first vertex to its second.
    fn along(&self, h: usize, a: (usize, usize), b: (usize, usize)) -> Ordering {
        let c = self.s.strand_order(&self.ray(a.0, a.1, h), &self.ray(b.0, b.1, h));
        if c != Ordering::Equal {
            return c.reverse();
        }
        let g = self.s.glue[h];
        let c = self.s.strand_order(&self.ray(a.0, a.1, g), &self.ray(b.0, b.1, g));
        c.then(a.cmp(&b))
    }
}

fn rel(x: usize, base: usize, m: usize) -> usize {
    (x + m - base) % m
}

/// Cut `s` along `cuts` (arcs, pairwise disjoint, without self-crossings) and carry
/// `riders` along. In contracting mode `copies` names the two sides of every cut.
pub fn cut(
    s: &CellSurface,
    cuts: &[Walk],
    copies: &[(Mark, Mark)],
    mode: Mode,
    riders: &[Walk],
) -> Result<CutOutput, CellError> {
    if cuts.iter().any(|c| c.closed) {
        return Err(CellError::Malformed("cuts must be arcs".into()));
    }
    // a port-free chord has no crossing point to contract
    if mode == Mode::Contract && cuts.iter().any(|c| c.ports.is_empty()) {
        return Err(CellError::Malformed("contracted cuts must cross at least one port".into()));
    }
    if mode == Mode::Contract && copies.len() != cuts.len() {
        return Err(CellError::Malformed("every cut needs two copy labels".into()));
    }
    let walks: Vec<&Walk> = cuts.iter().chain(riders.iter()).collect();
    let mut fwd = Vec::new();
    let mut bwd = Vec::new();
    for w in &walks {
        fwd.push(s.visits(w)?);
        bwd.push(s.visits(&s.reverse(w))?);
    }
    let st = Strands { s, walks, fwd, bwd };
    let nc = cuts.len();

    // strands along every half-edge, in its own direction
    let nh = s.glue.len();
    let mut along: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nh];
    for (w, walk) in st.walks.iter().enumerate() {
        for (t, &h) in walk.ports.iter().enumerate() {
            along[h.min(s.glue[h])].push((w, t));
        }
    }
    for h in 0..nh {
        if h < s.glue[h] {
            let mut v = std::mem::take(&mut along[h]);
            v.sort_by(|&a, &b| st.along(h, a, b));
            let mut r = v.clone();
            r.reverse();
            along[h] = v;
            along[s.glue[h]] = r;
        }
    }
    // rank among cut strands, and piece index for every strand
    let mut cut_rank: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    let mut piece_of: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    let mut n_cut_pts = vec![0usize; nh];
    for h in 0..nh {
        let mut j = 0;
        for &(w, t) in &along[h] {
            if w < nc {
                cut_rank.insert((h, w, t), j);
                j += 1;
            } else {
                piece_of.insert((h, w, t), j);
            }
        }
        n_cut_pts[h] = j;
    }

    // refined boundaries and chords
    let mut refined: Vec<Refined> = Vec::new();
    for poly in &s.polys {
        let mut points = Vec::new();
        for (i, side) in poly.edges.iter().enumerate() {
            points.push(Point::Vertex(i));
            if let Side::Port(h) = *side {
                points.extend((0..n_cut_pts[h]).map(|j| Point::Cross(h, j)));
            }
        }
        let index = points.iter().enumerate().map(|(k, p)| (*p, k)).collect();
        let n = points.len();
        refined.push(Refined { points, index, chords: Vec::new(), incident: vec![Vec::new(); n] });
    }
    for c in 0..nc {
        let walk = st.walks[c];
        let k = walk.ports.len();
        for (t, v) in st.fwd[c].iter().enumerate() {
            let a = if t == 0 {
                Point::Vertex(walk.start.1)
            } else {
                let g = s.glue[walk.ports[t - 1]];
                Point::Cross(g, cut_rank[&(g, c, t - 1)])
            };
            let b = if t == k {
                Point::Vertex(walk.end.1)
            } else {
                let h = walk.ports[t];
                Point::Cross(h, cut_rank[&(h, c, t)])
            };
            let r = &mut refined[v.poly];
            let (ia, ib) = (r.index[&a], r.index[&b]);
            let id = r.chords.len();
            r.chords.push(Chord { cut: c, a: ia, b: ib });
            r.incident[ia].push((ib, id));
            r.incident[ib].push((ia, id));
        }
    }

    // trace faces
    let mut faces: Vec<(usize, Vec<Elem>)> = Vec::new();
    for (p, r) in refined.iter().enumerate() {
        let m = r.points.len();
        let mut seen = vec![false; m];
        for start in 0..m {
            if seen[start] {
                continue;
            }
            let mut elems = Vec::new();
            let mut piece = start;
            loop {
                seen[piece] = true;
                elems.push(Elem::Piece(piece));
                let mut at = (piece + 1) % m;
                let mut limit = m;
                loop {
                    let best = r.incident[at]
                        .iter()
                        .filter(|&&(w, _)| rel(w, at, m) < limit)
                        .max_by_key(|&&(w, _)| rel(w, at, m));
                    let Some(&(w, id)) = best else { break };
                    elems.push(Elem::Chord(id, r.chords[id].a == at));
                    limit = rel(at, w, m);
                    at = w;
                }
                if at == start {
                    break;
                }
                if seen[at] {
                    return Err(CellError::Corrupt("cuts cross each other".into()));
                }
                piece = at;
            }
            faces.push((p, elems));
        }
    }

    // port piece ids
    let mut offset = vec![0usize; nh + 1];
    for h in 0..nh {
        offset[h + 1] = offset[h] + n_cut_pts[h] + 1;
    }
    let piece_id = |h: usize, j: usize| offset[h] + j;
    let mut glue = vec![0usize; offset[nh]];
    for h in 0..nh {
        let g = s.glue[h];
        for j in 0..=n_cut_pts[h] {
            glue[piece_id(h, j)] = piece_id(g, n_cut_pts[h] - j);
        }
    }
    let side_of_piece = |p: usize, k: usize| -> Side {
        let r = &refined[p];
        match r.points[k] {
            Point::Vertex(i) => match s.polys[p].edges[i] {
                Side::Port(h) => Side::Port(piece_id(h, 0)),
                other => other,
            },
            Point::Cross(h, j) => Side::Port(piece_id(h, j + 1)),
        }
    };
    let aux_id = |h: usize, j: usize| -> usize {
        let g = s.glue[h];
        let (rep, jj) = if h < g { (h, j) } else { (g, n_cut_pts[h] - 1 - j) };
        offset[rep] + jj
    };
    let mark_of = |p: usize, k: usize| -> Mark {
        match refined[p].points[k] {
            Point::Vertex(i) => s.polys[p].verts[i],
            Point::Cross(h, j) => match mode {
                Mode::Open { first_aux } => Mark::Aux(first_aux + aux_id(h, j)),
                Mode::Contract => unreachable!("crossing points are contracted"),
            },
        }
    };

    // build polygons; remember which refined points each new vertex carries
    let mut polys = Vec::new();
    let mut vertex_of: Vec<BTreeMap<usize, usize>> = Vec::new();
    for (p, elems) in &faces {
        let r = &refined[*p];
        let m = r.points.len();
        let mut verts = Vec::new();
        let mut edges = Vec::new();
        let mut carries = BTreeMap::new();
        let len = elems.len();
        for (i, e) in elems.iter().enumerate() {
            match (*e, mode) {
                (Elem::Piece(k), Mode::Contract) => {
                    let idx = verts.len();
                    carries.insert(k, idx);
                    let prev = elems[(i + len - 1) % len];
                    match prev {
                        Elem::Chord(id, forward) => {
                            let ch = &r.chords[id];
                            let other = if ch.a == k { ch.b } else { ch.a };
                            carries.insert(other, idx);
                            let (l, rt) = copies[ch.cut];
                            verts.push(if forward { l } else { rt });
                        }
                        Elem::Piece(_) => verts.push(mark_of(*p, k)),
                    }
                    edges.push(side_of_piece(*p, k));
                }
                (Elem::Piece(k), Mode::Open { .. }) => {
                    carries.insert(k, verts.len());
                    verts.push(mark_of(*p, k));
                    edges.push(side_of_piece(*p, k));
                }
                (Elem::Chord(id, forward), Mode::Open { .. }) => {
                    let ch = &r.chords[id];
                    let from = if forward { ch.a } else { ch.b };
                    carries.insert(from, verts.len());
                    verts.push(mark_of(*p, from));
                    edges.push(Side::Cut);
                }
                (Elem::Chord(..), Mode::Contract) => {}
            }
        }
        debug_assert!(carries.keys().all(|&k| k < m));
        polys.push(Poly { verts, edges });
        vertex_of.push(carries);
    }
    let surface = CellSurface::new(polys, glue)?;

    // carry riders over
    let find_vertex = |face: usize, p: usize, i: usize| -> Option<(usize, usize)> {
        let k = refined[p].index[&Point::Vertex(i)];
        vertex_of[face].get(&k).map(|&v| (face, v))
    };
    let mut out_riders = Vec::new();
    for (ri, walk) in riders.iter().enumerate() {
        let w = nc + ri;
        let ports: Vec<usize> =
            walk.ports.iter().enumerate().map(|(t, &h)| piece_id(h, piece_of[&(h, w, t)])).collect();
        if walk.closed {
            let nw = Walk::closed(ports);
            out_riders.push(surface.visits(&nw).ok().map(|_| nw));
            continue;
        }
        let first = surface.poly_of(ports[0]);
        let last = surface.poly_of(surface.glue[*ports.last().unwrap()]);
        let start = find_vertex(first, walk.start.0, walk.start.1);
        let end = find_vertex(last, walk.end.0, walk.end.1);
        let nw = match (start, end) {
            (Some(start), Some(end)) => Some(Walk { closed: false, start, end, ports }),
            _ => None,
        };
        out_riders.push(nw.filter(|nw| surface.visits(nw).is_ok()));
    }
    Ok(CutOutput { surface, riders: out_riders })
}
