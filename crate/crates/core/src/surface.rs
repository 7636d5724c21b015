//! The dissected marked surface of a gentle algebra.
//!
//! Each vertex contributes one arc of the ∘-dissection, with two ends. At a vertex, an
//! incoming arrow `a` and an outgoing arrow `b` with `ab ≠ 0` share an end; the remaining
//! arrows get ends of their own and empty ends pad the count to two. An arrow `a: u → v`
//! joins the end of `u` holding `a` to the end of `v` holding `a`, and the maximal chains
//! of ends built this way are the fans of the ∘ points, listed in arrow direction
//! (anticlockwise). The dual polygon `P_q` around a ∘ point `q` is
//! `[q, ∂, c_0, e_0, c_1, …, e_{m-1}, c_m, ∂]` where `e_k` is the dual arc of the `k`-th
//! fan entry and the corners `c_k` are ● points.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{GentleAlgebra, SCHEMA};
use crate::cells::{CellError, CellSurface, Mark, Poly, Side, Walk};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct End {
    pub vertex: usize,
    pub incoming: Option<usize>,
    pub outgoing: Option<usize>,
}

#[derive(Debug, Error)]
pub enum SurfaceError {
    #[error("corrupt surface: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Cells(#[from] CellError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BulletKind {
    Boundary,
    Puncture,
}

#[derive(Debug, Clone)]
pub struct DissectedSurface {
    pub algebra: GentleAlgebra,
    /// Dart `2v + e` is end `e` of the arc of vertex `v`.
    pub ends: Vec<End>,
    pub fans: Vec<Vec<usize>>,
    /// `fan_arrows[q][k]` joins slot `k` to slot `k + 1`.
    pub fan_arrows: Vec<Vec<usize>>,
    pub dart_loc: Vec<(usize, usize)>,
    pub cells: CellSurface,
    pub bullets: Vec<BulletKind>,
    /// Boundary components as cyclic lists of marked points.
    pub boundary: Vec<Vec<Mark>>,
    pub genus: i64,
}

pub fn opp(dart: usize) -> usize {
    dart ^ 1
}

pub fn port_position(slot: usize) -> usize {
    2 * slot + 3
}

/// Slot of a port position in a base polygon, `None` for the ∘ point and corners.
pub fn slot_of_position(pos: usize) -> Option<usize> {
    (pos >= 3 && pos % 2 == 1).then(|| (pos - 3) / 2)
}

fn vertex_ends(alg: &GentleAlgebra, v: usize) -> Vec<End> {
    let ins = alg.in_arrows(v);
    let outs = alg.out_arrows(v);
    let mut ends: Vec<End> = Vec::new();
    let mut used_out = vec![false; outs.len()];
    for &a in &ins {
        let partner = outs.iter().position(|&b| !alg.is_relation(a, b));
        if let Some(k) = partner {
            used_out[k] = true;
        }
        ends.push(End { vertex: v, incoming: Some(a), outgoing: partner.map(|k| outs[k]) });
    }
    for (k, &b) in outs.iter().enumerate() {
        if !used_out[k] {
            ends.push(End { vertex: v, incoming: None, outgoing: Some(b) });
        }
    }
    let key = |e: &End| {
        let ids: Vec<&str> = [e.incoming, e.outgoing]
            .iter()
            .flatten()
            .map(|&a| alg.arrows[a].id.as_str())
            .collect();
        ids.into_iter().min().map(|s| s.to_string())
    };
    ends.sort_by(|x, y| match (key(x), key(y)) {
        (Some(a), Some(b)) => a.cmp(&b),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    while ends.len() < 2 {
        ends.push(End { vertex: v, incoming: None, outgoing: None });
    }
    debug_assert_eq!(ends.len(), 2, "gentle vertices have two ends");
    ends
}

impl DissectedSurface {
    pub fn from_algebra(alg: &GentleAlgebra) -> Result<Self, SurfaceError> {
        let nv = alg.n_vertices();
        let mut ends = Vec::with_capacity(2 * nv);
        for v in 0..nv {
            ends.extend(vertex_ends(alg, v));
        }
        let holding_out = |a: usize| ends.iter().position(|e| e.outgoing == Some(a)).unwrap();
        let holding_in = |a: usize| ends.iter().position(|e| e.incoming == Some(a)).unwrap();

        let mut fans: Vec<Vec<usize>> = Vec::new();
        let mut fan_arrows: Vec<Vec<usize>> = Vec::new();
        let mut seen = vec![false; ends.len()];
        for d in 0..ends.len() {
            if ends[d].incoming.is_some() {
                continue;
            }
            let mut fan = vec![d];
            let mut arrows = vec![];
            let mut cur = d;
            seen[d] = true;
            while let Some(a) = ends[cur].outgoing {
                debug_assert_eq!(holding_out(a), cur);
                cur = holding_in(a);
                if seen[cur] {
                    return Err(SurfaceError::Corrupt("cyclic fan".into()));
                }
                seen[cur] = true;
                fan.push(cur);
                arrows.push(a);
            }
            fans.push(fan);
            fan_arrows.push(arrows);
        }
        if seen.iter().any(|s| !s) {
            return Err(SurfaceError::Corrupt("an end lies on an oriented cycle without relations".into()));
        }
        let mut order: Vec<usize> = (0..fans.len()).collect();
        order.sort_by(|&x, &y| fans[x].cmp(&fans[y]));
        let fans: Vec<Vec<usize>> = order.iter().map(|&i| fans[i].clone()).collect();
        let fan_arrows: Vec<Vec<usize>> = order.iter().map(|&i| fan_arrows[i].clone()).collect();

        let mut dart_loc = vec![(0, 0); ends.len()];
        for (q, fan) in fans.iter().enumerate() {
            for (k, &d) in fan.iter().enumerate() {
                dart_loc[d] = (q, k);
            }
        }

        let mut polys = Vec::new();
        let mut corner = 0;
        for (q, fan) in fans.iter().enumerate() {
            let mut verts = vec![Mark::Circ(q)];
            let mut edges = vec![Side::Bd];
            for &d in fan {
                verts.push(Mark::Bullet(corner));
                corner += 1;
                edges.push(Side::Port(d));
            }
            verts.push(Mark::Bullet(corner));
            corner += 1;
            edges.push(Side::Bd);
            polys.push(Poly { verts, edges });
        }
        let glue: Vec<usize> = (0..ends.len()).map(opp).collect();
        let mut cells = CellSurface::new(polys, glue)?;
        cells.relabel();
        cells.check()?;

        let bmarks = cells.boundary_marks();
        let nb = cells.marks().iter().filter(|m| matches!(m, Mark::Bullet(_))).count();
        let bullets = (0..nb)
            .map(|i| {
                if bmarks.contains(&Mark::Bullet(i)) {
                    BulletKind::Boundary
                } else {
                    BulletKind::Puncture
                }
            })
            .collect();

        let mut s = DissectedSurface {
            algebra: alg.clone(),
            ends,
            fans,
            fan_arrows,
            dart_loc,
            cells,
            bullets,
            boundary: vec![],
            genus: 0,
        };
        s.boundary = s.trace_boundary();
        let inv = s.cells.invariants();
        if inv.len() != 1 {
            return Err(SurfaceError::Corrupt("surface is disconnected".into()));
        }
        s.genus = inv[0].genus;
        s.verify()?;
        Ok(s)
    }

    pub fn n_circ(&self) -> usize {
        self.fans.len()
    }

    pub fn n_boundary_bullets(&self) -> usize {
        self.bullets.iter().filter(|b| **b == BulletKind::Boundary).count()
    }

    pub fn n_punctures(&self) -> usize {
        self.bullets.iter().filter(|b| **b == BulletKind::Puncture).count()
    }

    pub fn n_arcs(&self) -> usize {
        self.algebra.n_vertices()
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary.len()
    }

    /// The arc count of an admissible ∘-dissection.
    pub fn dissection_size(&self) -> i64 {
        self.n_circ() as i64 + self.n_punctures() as i64 + self.boundary_count() as i64 + 2 * self.genus - 2
    }

    /// The ● corner at gap `k` of the fan of `q`.
    pub fn gap_bullet(&self, q: usize, k: usize) -> Mark {
        self.cells.polys[q].verts[k + 1]
    }

    /// Faces of the ∘-dissection found by walking around corners: each face is the
    /// list of gaps `(q, k)` it touches. Used to cross-check the cell gluing.
    pub fn trace_faces(&self) -> Vec<Vec<(usize, usize)>> {
        let mut done: Vec<Vec<bool>> = self.fans.iter().map(|f| vec![false; f.len() + 1]).collect();
        let mut faces = Vec::new();
        let step = |q: usize, k: usize| -> Option<(usize, usize)> {
            let fan = &self.fans[q];
            (k < fan.len()).then(|| {
                let (q2, j) = self.dart_loc[opp(fan[k])];
                (q2, j + 1)
            })
        };
        // boundary faces start at gap 0, punctures are cycles of inner gaps
        for q in 0..self.fans.len() {
            let mut face = vec![(q, 0)];
            done[q][0] = true;
            let mut cur = (q, 0);
            while let Some(nx) = step(cur.0, cur.1) {
                face.push(nx);
                done[nx.0][nx.1] = true;
                cur = nx;
            }
            faces.push(face);
        }
        for q in 0..self.fans.len() {
            for k in 0..=self.fans[q].len() {
                if done[q][k] {
                    continue;
                }
                let mut face = vec![(q, k)];
                done[q][k] = true;
                let mut cur = (q, k);
                while let Some(nx) = step(cur.0, cur.1) {
                    if nx == (q, k) {
                        break;
                    }
                    face.push(nx);
                    done[nx.0][nx.1] = true;
                    cur = nx;
                }
                faces.push(face);
            }
        }
        faces
    }

    fn trace_boundary(&self) -> Vec<Vec<Mark>> {
        let faces = self.trace_faces();
        // the boundary face starting at gap 0 of q ends at the last gap of the next ∘
        // point met when walking along the boundary
        let mut next = vec![0; self.fans.len()];
        for f in faces.iter().take(self.fans.len()) {
            let (q, _) = f[0];
            let (q2, _) = *f.last().unwrap();
            next[q2] = q;
        }
        let mut seen = vec![false; self.fans.len()];
        let mut cycles = Vec::new();
        for q in 0..self.fans.len() {
            if seen[q] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut cur = q;
            while !seen[cur] {
                seen[cur] = true;
                cyc.push(Mark::Circ(cur));
                let m = self.fans[cur].len();
                cyc.push(self.gap_bullet(cur, m));
                cur = next[cur];
            }
            cycles.push(cyc);
        }
        cycles
    }

    /// Cross-check the stored data against the face tracing and the Euler characteristic.
    pub fn verify(&self) -> Result<(), SurfaceError> {
        let faces = self.trace_faces();
        for face in &faces {
            let first = self.gap_bullet(face[0].0, face[0].1);
            if face.iter().any(|&(q, k)| self.gap_bullet(q, k) != first) {
                return Err(SurfaceError::Corrupt("face tracing disagrees with the gluing".into()));
            }
        }
        if faces.len() != self.bullets.len() {
            return Err(SurfaceError::Corrupt("a face holds more than one ● point".into()));
        }
        if self.n_boundary_bullets() != self.n_circ() {
            return Err(SurfaceError::Corrupt("∘ and ● points do not alternate".into()));
        }
        let inv = &self.cells.invariants()[0];
        if inv.boundary_cycles != self.boundary.len() {
            return Err(SurfaceError::Corrupt("boundary count mismatch".into()));
        }
        let chi = self.bullets.len() as i64 - self.n_arcs() as i64;
        if chi != 2 - 2 * self.genus - self.boundary.len() as i64 {
            return Err(SurfaceError::Corrupt("Euler characteristic mismatch".into()));
        }
        if self.dissection_size() != self.n_arcs() as i64 {
            return Err(SurfaceError::Corrupt("arc count formula fails".into()));
        }
        Ok(())
    }

    /// Recompute genus and boundary count from the cells alone.
    pub fn euler_invariants(&self) -> Result<(i64, usize), SurfaceError> {
        let inv = self.cells.invariants();
        let (g, b) = (inv[0].genus, inv[0].boundary_cycles);
        if g != self.genus || b != self.boundary.len() {
            return Err(SurfaceError::Corrupt(format!(
                "stored (g,b) = ({}, {}) but cells give ({g}, {b})",
                self.genus,
                self.boundary.len()
            )));
        }
        Ok((g, b))
    }

    /// The algebra read back from the fans: consecutive slots give arrows, and two
    /// consecutive arrows at a vertex compose to zero unless they are consecutive in
    /// one fan.
    pub fn read_algebra(&self) -> GentleAlgebra {
        let alg = &self.algebra;
        let mut arrows = Vec::new();
        for (q, fan) in self.fans.iter().enumerate() {
            for (k, &a) in self.fan_arrows[q].iter().enumerate() {
                let (u, v) = (fan[k] / 2, fan[k + 1] / 2);
                arrows.push((a, u, v));
            }
        }
        arrows.sort();
        let mut relations = std::collections::BTreeSet::new();
        for &(a, _, va) in &arrows {
            for &(b, ub, _) in &arrows {
                if va != ub {
                    continue;
                }
                let in_one_fan = self.fan_arrows.iter().any(|fa| fa.windows(2).any(|w| w == [a, b]));
                if !in_one_fan {
                    relations.insert((a, b));
                }
            }
        }
        GentleAlgebra {
            vertices: alg.vertices.clone(),
            arrows: arrows
                .iter()
                .map(|&(a, u, v)| crate::algebra::Arrow { id: alg.arrows[a].id.clone(), source: u, target: v })
                .collect(),
            relations,
        }
    }

    pub fn circ_name(&self, q: usize) -> String {
        format!("o{q}")
    }

    pub fn mark_name(&self, m: Mark) -> String {
        match m {
            Mark::Circ(q) => format!("o{q}"),
            Mark::Bullet(b) => match self.bullets[b] {
                BulletKind::Boundary => format!("x{b}"),
                BulletKind::Puncture => format!("p{b}"),
            },
            Mark::Aux(a) => format!("y{a}"),
        }
    }

    pub fn circ_index(&self, name: &str) -> Option<usize> {
        name.strip_prefix('o')?.parse().ok().filter(|&q| q < self.n_circ())
    }

    /// The arc of Δ for vertex `v`, running from end 0 to end 1.
    pub fn dissection_arc(&self, v: usize) -> Walk {
        let d = 2 * v;
        Walk { closed: false, start: (self.dart_loc[d].0, 0), end: (self.dart_loc[opp(d)].0, 0), ports: vec![d] }
    }

    /// Dual arc endpoints: the ● corners on either side of the dart `2v`.
    pub fn dual_arc(&self, v: usize) -> (Mark, Mark) {
        let (q, k) = self.dart_loc[2 * v];
        (self.gap_bullet(q, k), self.gap_bullet(q, k + 1))
    }

    pub fn dump(&self) -> SurfaceDoc {
        let alg = &self.algebra;
        SurfaceDoc {
            schema: SCHEMA.to_string(),
            genus: self.genus,
            boundary_count: self.boundary.len(),
            circ_points: self
                .fans
                .iter()
                .enumerate()
                .map(|(q, fan)| CircDoc {
                    id: self.circ_name(q),
                    fan: fan.iter().map(|&d| alg.vertices[d / 2].clone()).collect(),
                    arrows: self.fan_arrows[q].iter().map(|&a| alg.arrows[a].id.clone()).collect(),
                })
                .collect(),
            bullet_points: (0..self.bullets.len())
                .filter(|&b| self.bullets[b] == BulletKind::Boundary)
                .map(|b| self.mark_name(Mark::Bullet(b)))
                .collect(),
            punctures: (0..self.bullets.len())
                .filter(|&b| self.bullets[b] == BulletKind::Puncture)
                .map(|b| self.mark_name(Mark::Bullet(b)))
                .collect(),
            boundary_components: self
                .boundary
                .iter()
                .map(|c| c.iter().map(|&m| self.mark_name(m)).collect())
                .collect(),
            arcs: (0..alg.n_vertices())
                .map(|v| {
                    let e = |d: usize| {
                        let (q, k) = self.dart_loc[d];
                        SlotDoc { point: self.circ_name(q), slot: k }
                    };
                    ArcDoc { id: alg.vertices[v].clone(), ends: [e(2 * v), e(2 * v + 1)] }
                })
                .collect(),
            faces: self
                .trace_faces()
                .iter()
                .map(|f| FaceDoc {
                    bullet: self.mark_name(self.gap_bullet(f[0].0, f[0].1)),
                    gaps: f.iter().map(|&(q, k)| SlotDoc { point: self.circ_name(q), slot: k }).collect(),
                })
                .collect(),
        }
    }

    pub fn dual_dump(&self) -> DualDoc {
        let alg = &self.algebra;
        DualDoc {
            schema: SCHEMA.to_string(),
            dual_arcs: (0..alg.n_vertices())
                .map(|v| {
                    let (a, b) = self.dual_arc(v);
                    DualArcDoc {
                        id: alg.vertices[v].clone(),
                        crosses: alg.vertices[v].clone(),
                        ends: [self.mark_name(a), self.mark_name(b)],
                    }
                })
                .collect(),
            polygons: (0..self.n_circ())
                .map(|q| DualPolyDoc {
                    circ: self.circ_name(q),
                    sides: self.fans[q].iter().map(|&d| alg.vertices[d / 2].clone()).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SlotDoc {
    pub point: String,
    pub slot: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct CircDoc {
    pub id: String,
    pub fan: Vec<String>,
    pub arrows: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ArcDoc {
    pub id: String,
    pub ends: [SlotDoc; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FaceDoc {
    pub bullet: String,
    pub gaps: Vec<SlotDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDoc {
    pub schema: String,
    pub genus: i64,
    pub boundary_count: usize,
    pub circ_points: Vec<CircDoc>,
    pub bullet_points: Vec<String>,
    pub punctures: Vec<String>,
    pub boundary_components: Vec<Vec<String>>,
    pub arcs: Vec<ArcDoc>,
    pub faces: Vec<FaceDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct DualArcDoc {
    pub id: String,
    pub crosses: String,
    pub ends: [String; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct DualPolyDoc {
    pub circ: String,
    pub sides: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct DualDoc {
    pub schema: String,
    pub dual_arcs: Vec<DualArcDoc>,
    pub polygons: Vec<DualPolyDoc>,
}

/// Counts of marked points by kind, used by tests and the CLI.
pub fn census(s: &DissectedSurface) -> BTreeMap<&'static str, i64> {
    BTreeMap::from([
        ("genus", s.genus),
        ("boundary", s.boundary_count() as i64),
        ("circ", s.n_circ() as i64),
        ("bullet", s.n_boundary_bullets() as i64),
        ("punctures", s.n_punctures() as i64),
        ("arcs", s.n_arcs() as i64),
    ])
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn surf(text: &str) -> DissectedSurface {
        DissectedSurface::from_algebra(&GentleAlgebra::from_json(text).unwrap()).unwrap()
    }

    pub const A1: &str = r#"{"vertices":["1"]}"#;
    pub const A2: &str = r#"{"vertices":["1","2"],"arrows":[{"id":"a","source":"1","target":"2"}]}"#;
    pub const KRONECKER: &str = r#"{"vertices":["1","2"],"arrows":[{"id":"a","source":"1","target":"2"},{"id":"b","source":"1","target":"2"}]}"#;
    pub const A3_REL: &str = r#"{"vertices":["1","2","3"],"arrows":[{"id":"a","source":"1","target":"2"},{"id":"b","source":"2","target":"3"}],"relations":[["a","b"]]}"#;

    fn counts(s: &DissectedSurface) -> (i64, usize, usize, usize, usize, usize) {
        (s.genus, s.boundary_count(), s.n_circ(), s.n_boundary_bullets(), s.n_punctures(), s.n_arcs())
    }

    #[test]
    fn small_surfaces() {
        assert_eq!(counts(&surf(A1)), (0, 1, 2, 2, 0, 1));
        assert_eq!(counts(&surf(A2)), (0, 1, 3, 3, 0, 2));
        assert_eq!(counts(&surf(KRONECKER)), (0, 2, 2, 2, 0, 2));
        assert_eq!(counts(&surf(A3_REL)), (0, 1, 4, 4, 0, 3));
    }

    #[test]
    fn loop_with_square_zero_has_a_puncture() {
        let s = surf(r#"{"vertices":["1"],"arrows":[{"id":"x","source":"1","target":"1"}],"relations":[["x","x"]]}"#);
        assert_eq!(s.n_arcs(), 1);
        assert_eq!(s.n_punctures() + s.n_circ() + s.boundary_count() + 2 * s.genus as usize, 3);
    }

    #[test]
    fn torus_with_one_boundary() {
        let s = surf(
            r#"{"vertices":["1","2"],"arrows":[
                {"id":"a","source":"1","target":"2"},{"id":"b","source":"1","target":"2"},
                {"id":"c","source":"2","target":"1"}],
              "relations":[["c","a"],["b","c"]]}"#,
        );
        assert_eq!(s.n_circ(), 1);
        assert_eq!(s.euler_invariants().unwrap(), (1, 1));
    }

    #[test]
    fn read_back_matches() {
        for t in [A1, A2, KRONECKER, A3_REL] {
            let s = surf(t);
            assert_eq!(s.read_algebra(), s.algebra);
        }
    }
}
