//! Oriented intersections of graded curves and the Hom tables they give.
//!
//! A boundary record at a ∘ point gives one map from `α` to `β` in degree
//! `f_β(s') - f_α(s)`, where `s` and `s'` are the crossings nearest the point. An interior
//! crossing gives one map in each direction; the degree depends on how the strands meet.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cells::{CellError, CellSurface, Hit, Mark, Walk};
use crate::curves::{CurveError, CurveWord, GradedCurve};
use crate::surface::DissectedSurface;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "locus", rename_all = "lowercase")]
pub enum Locus {
    /// An interior crossing; the strands share `overlap` crossings with the dissection.
    Interior { overlap: usize },
    /// A common endpoint at a ∘ point; `ends` are the end indices (0 start, 1 end).
    Boundary { point: String, ends: (usize, usize) },
    /// The identity of a curve with itself.
    Identity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionRecord {
    #[serde(flatten)]
    pub locus: Locus,
    /// Crossing indices on the two curves where the record is read.
    pub crossings: (usize, usize),
    pub degree: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct HomTable {
    pub per_degree: BTreeMap<i64, usize>,
    pub total: usize,
}

impl HomTable {
    pub fn from_degrees(it: impl IntoIterator<Item = i64>) -> Self {
        let mut t = HomTable::default();
        for d in it {
            *t.per_degree.entry(d).or_default() += 1;
            t.total += 1;
        }
        t
    }

    pub fn scaled(&self, k: usize) -> Self {
        HomTable {
            per_degree: self.per_degree.iter().map(|(&d, &n)| (d, n * k)).collect(),
            total: self.total * k,
        }
    }

    pub fn get(&self, d: i64) -> usize {
        self.per_degree.get(&d).copied().unwrap_or(0)
    }

    /// Tab-separated rows `degree<TAB>dim` and a final total row.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (d, n) in &self.per_degree {
            out.push_str(&format!("{d}\t{n}\n"));
        }
        out.push_str(&format!("total\t{}\n", self.total));
        out
    }
}

/// Ordered end pairs at shared ∘ points where `β`'s end follows `α`'s anticlockwise.
pub fn endpoint_intersections(s: &DissectedSurface, a: &CurveWord, b: &CurveWord) -> Vec<(usize, usize, Mark)> {
    if a.closed || b.closed {
        return vec![];
    }
    s.cells
        .boundary_pairs(&a.walk(s), &b.walk(s))
        .expect("curves on the base surface are consistent")
        .into_iter()
        .filter(|(_, _, m)| matches!(m, Mark::Circ(_)))
        .collect()
}

fn hits(s: &DissectedSurface, a: &CurveWord, b: &CurveWord, same: bool) -> Vec<Hit> {
    s.cells.interior_hits(&a.walk(s), &b.walk(s), same).expect("curves on the base surface are consistent")
}

/// Minimal number of interior crossings between two reduced curves.
pub fn interior_intersections(s: &DissectedSurface, a: &CurveWord, b: &CurveWord) -> usize {
    if a.same_curve(b, s) {
        return self_intersections(s, a);
    }
    hits(s, a, b, false).len()
}

pub fn self_intersections(s: &DissectedSurface, a: &CurveWord) -> usize {
    hits(s, a, a, true).len() / 2
}

/// `b` reoriented to match `a` when both are the same curve, with the index rotation
/// needed for closed words.
fn align(s: &DissectedSurface, a: &GradedCurve, b: &GradedCurve) -> Option<GradedCurve> {
    if a.word.closed != b.word.closed {
        return None;
    }
    let k = a.word.darts.len();
    if b.word.darts.len() != k {
        return None;
    }
    for cand in [b.clone(), b.reversed()] {
        if !a.word.closed {
            if cand.word == a.word {
                return Some(cand);
            }
            continue;
        }
        for r in 0..k {
            let mut d = cand.word.darts.clone();
            d.rotate_left(r);
            if d == a.word.darts {
                let mut f = cand.f.clone();
                f.rotate_left(r);
                return Some(GradedCurve { word: a.word.clone(), f, band: cand.band });
            }
        }
    }
    let _ = s;
    None
}

fn f_at(gc: &GradedCurve, i: usize) -> i64 {
    gc.f[i % gc.f.len()]
}

/// Degree of the map from `a` to `b` read at an interior crossing.
fn interior_degree(s: &DissectedSurface, a: &GradedCurve, b: &GradedCurve, h: &Hit) -> (i64, usize, usize) {
    let b_or = if h.b_reversed { b.reversed() } else { b.clone() };
    let (ka, kb) = (a.word.darts.len(), b_or.word.darts.len());
    if h.len >= 1 {
        let (i, j) = (h.a_visit % ka, h.b_visit % kb);
        let d = f_at(&b_or, j) - f_at(a, i) + i64::from(h.a_right);
        let jb = if h.b_reversed { kb - 1 - j } else { j };
        return (d, i, jb);
    }
    // both strands cross inside one polygon
    let va = a.word.visits(s);
    let vb = b_or.word.visits(s);
    let (x, y) = (va[h.a_visit], vb[h.b_visit]);
    let low = |gc: &GradedCurve, t: usize, entry: usize, exit: usize| -> (usize, i64) {
        let k = gc.word.darts.len();
        let closed = gc.word.closed;
        // crossing index of the entry and exit ports of visit t
        let entry_idx = if closed { Some((t + k - 1) % k) } else { t.checked_sub(1) };
        let exit_idx = if closed || t < k { Some(t % k) } else { None };
        let val = |idx: Option<usize>| idx.map(|i| gc.f[i]);
        let (lo_pos, lo_val, hi_val) =
            if entry < exit { (entry, val(entry_idx), val(exit_idx)) } else { (exit, val(exit_idx), val(entry_idx)) };
        let f = lo_val.unwrap_or_else(|| hi_val.expect("a visit has a port") - 1);
        (lo_pos, f)
    };
    let (pa, fa) = low(a, h.a_visit, x.entry, x.exit);
    let (pb, fb) = low(&b_or, h.b_visit, y.entry, y.exit);
    let d = fb - fa + i64::from(pb < pa);
    let ia = h.a_visit.min(ka.saturating_sub(1));
    let jb = h.b_visit.min(kb.saturating_sub(1));
    let jb = if h.b_reversed { kb - 1 - jb } else { jb };
    (d, ia, jb)
}

/// All oriented intersections from `a` to `b`, with the identity when they are the same
/// curve. For powers of a common closed curve the records do not span the Hom space.
pub fn records(s: &DissectedSurface, a: &GradedCurve, b: &GradedCurve) -> Vec<IntersectionRecord> {
    let aligned = align(s, a, b).filter(|_| a.word.same_curve(&b.word, s));
    let same = aligned.is_some();
    let b = aligned.unwrap_or_else(|| b.clone());
    let mut out = Vec::new();
    if same {
        out.push(IntersectionRecord { locus: Locus::Identity, crossings: (0, 0), degree: b.f[0] - a.f[0] });
    }
    for (ea, eb, m) in endpoint_intersections(s, &a.word, &b.word) {
        let (i, j) = (a.word.end_crossing(ea), b.word.end_crossing(eb));
        out.push(IntersectionRecord {
            locus: Locus::Boundary { point: s.mark_name(m), ends: (ea, eb) },
            crossings: (i, j),
            degree: b.f[j] - a.f[i],
        });
    }
    for h in hits(s, &a.word, &b.word, same) {
        let (degree, i, j) = interior_degree(s, a, &b, &h);
        out.push(IntersectionRecord { locus: Locus::Interior { overlap: h.len }, crossings: (i, j), degree });
    }
    out
}

/// The oriented intersection number, following the case table: same non-loop arc
/// `2·#+1`, same loop `2·#`, powers `γ^m`, `γ^n` of one primitive closed curve
/// `mn·(2·#+1)`, otherwise the number of records.
pub fn intersection_number(s: &DissectedSurface, a: &GradedCurve, b: &GradedCurve) -> usize {
    hom_table(s, a, b).map(|t| t.total).unwrap_or(0)
}

fn primitive(gc: &GradedCurve) -> (GradedCurve, usize) {
    if !gc.word.closed {
        return (gc.clone(), 1);
    }
    let (root, f, lambda, mult) = gc.band_data();
    (GradedCurve { word: root, f, band: Some(crate::curves::Band { lambda, n: 1 }) }, mult)
}

/// Graded Hom dimensions `dim Hom(P_a, P_b[d])` read off the intersections.
pub fn hom_table(s: &DissectedSurface, a: &GradedCurve, b: &GradedCurve) -> Result<HomTable, CurveError> {
    let (pa, m) = primitive(a);
    let (pb, n) = primitive(b);
    let base = HomTable::from_degrees(records(s, &pa, &pb).into_iter().map(|r| r.degree));
    Ok(base.scaled(m * n))
}

/// Whether the two curves are powers of one primitive closed curve.
pub fn same_primitive(s: &DissectedSurface, a: &GradedCurve, b: &GradedCurve) -> bool {
    a.word.closed && b.word.closed && a.word.root().0.same_curve(&b.word.root().0, s)
}

/// Oriented intersection count of two reduced walks on any cell surface, read with the
/// same table as [`intersection_number`] but without gradings. `ma` and `mb` multiply
/// closed curves (band multiplicities).
pub fn walk_intersections(c: &CellSurface, a: &Walk, ma: usize, b: &Walk, mb: usize) -> Result<usize, CellError> {
    let (ra, pa) = c.root(a);
    let (rb, pb) = c.root(b);
    let same = c.same_curve(&ra, &rb);
    let rb = if same { ra.clone() } else { rb };
    let boundary = c.boundary_pairs(&ra, &rb)?.into_iter().filter(|(_, _, m)| matches!(m, Mark::Circ(_))).count();
    let interior = c.interior_hits(&ra, &rb, same)?.len();
    Ok((usize::from(same) + boundary + interior) * pa * ma * pb * mb)
}
