//! Admissible collections, silting and tilting dissections.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cells::{CellError, CellSurface, Mark, Walk};
use crate::algebra::SCHEMA;
use crate::curves::{decode, encode, CurveDoc, CurveError, CurveWord, GradedCurve};
use crate::cutting::{self, Mode};
use crate::homs::hom_table;
use crate::surface::DissectedSurface;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Admissibility {
    AdmissibleDissection,
    AdmissibleCollection,
    NotAdmissible { reason: String, witness: Option<(usize, usize)> },
}

impl Admissibility {
    pub fn is_dissection(&self) -> bool {
        matches!(self, Admissibility::AdmissibleDissection)
    }

    pub fn is_admissible(&self) -> bool {
        !matches!(self, Admissibility::NotAdmissible { .. })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SiltingError {
    #[error("the dissection is not silting")]
    NotSilting,
    #[error("arc {0} is not in the dissection")]
    NoSuchArc(usize),
    #[error("arc {0} is a closed curve")]
    NotArc(usize),
}

/// `|M∘| + |P| + b + 2g - 2` summed over the components of `c`: the number of arcs in
/// an admissible dissection.
pub fn expected_size(c: &CellSurface) -> i64 {
    let comp = c.component_of_polys();
    let mut circs: BTreeMap<usize, BTreeSet<Mark>> = BTreeMap::new();
    for (p, poly) in c.polys.iter().enumerate() {
        for m in &poly.verts {
            if matches!(m, Mark::Circ(_)) {
                circs.entry(comp[p]).or_default().insert(*m);
            }
        }
    }
    c.invariants()
        .iter()
        .enumerate()
        .map(|(i, inv)| {
            let nc = circs.get(&i).map_or(0, |s| s.len()) as i64;
            nc + inv.punctures as i64 + inv.boundary_cycles as i64 + 2 * inv.genus - 2
        })
        .sum()
}

/// Check reduced arcs on a cell surface: pairwise disjoint away from their endpoints, no
/// repeats, and every piece of the complement holds a ● point.
pub fn check_walks(c: &CellSurface, arcs: &[Walk]) -> Result<Admissibility, CellError> {
    let not = |reason: &str, witness| Admissibility::NotAdmissible { reason: reason.into(), witness };
    for (i, a) in arcs.iter().enumerate() {
        if a.closed {
            return Ok(not("closed curve", Some((i, i))));
        }
        if c.self_crossings(a)? > 0 {
            return Ok(not("self-intersection", Some((i, i))));
        }
        for (j, b) in arcs.iter().enumerate().skip(i + 1) {
            if c.same_curve(a, b) {
                return Ok(not("repeated arc", Some((i, j))));
            }
            if c.interior_count(a, b)? > 0 {
                return Ok(not("interior intersection", Some((i, j))));
            }
        }
    }
    if !arcs.is_empty() {
        let open = cutting::cut(c, arcs, &[], Mode::Open { first_aux: 0 }, &[])?;
        let comp = open.surface.component_of_polys();
        let mut bullets = vec![false; comp.iter().copied().max().map_or(0, |m| m + 1)];
        for (p, poly) in open.surface.polys.iter().enumerate() {
            if poly.verts.iter().any(|m| matches!(m, Mark::Bullet(_))) {
                bullets[comp[p]] = true;
            }
        }
        if bullets.iter().any(|b| !b) {
            return Ok(not("a piece of the complement has no ● point", None));
        }
    }
    if arcs.len() as i64 == expected_size(c) {
        Ok(Admissibility::AdmissibleDissection)
    } else {
        Ok(Admissibility::AdmissibleCollection)
    }
}

pub fn check_admissible(s: &DissectedSurface, arcs: &[CurveWord]) -> Admissibility {
    let walks: Vec<Walk> = arcs.iter().map(|a| a.walk(s)).collect();
    check_walks(&s.cells, &walks).expect("curves on the base surface are consistent")
}

/// A positive-degree morphism found between two arcs of a collection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub from: usize,
    pub to: usize,
    pub degree: i64,
    pub dim: usize,
}

pub fn presilting_witnesses(s: &DissectedSurface, arcs: &[GradedCurve]) -> Vec<Witness> {
    let mut out = Vec::new();
    for (i, x) in arcs.iter().enumerate() {
        for (j, y) in arcs.iter().enumerate() {
            let t = hom_table(s, x, y).expect("perfect curves have finite tables");
            for (&degree, &dim) in t.per_degree.range(1..) {
                out.push(Witness { from: i, to: j, degree, dim });
            }
        }
    }
    out
}

pub fn is_presilting(s: &DissectedSurface, arcs: &[GradedCurve]) -> bool {
    presilting_witnesses(s, arcs).is_empty()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GradedDissection {
    pub arcs: Vec<GradedCurve>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SiltingReport {
    pub admissibility: Admissibility,
    pub admissible: bool,
    pub presilting: bool,
    pub silting: bool,
    pub tilting: bool,
    pub witnesses: Vec<Witness>,
}

impl GradedDissection {
    /// The initial dissection with every arc graded by 0.
    pub fn initial(s: &DissectedSurface) -> Self {
        let arcs = (0..s.n_arcs())
            .map(|v| {
                let w = CurveWord::from_walk(&s.dissection_arc(v));
                crate::curves::grade(s, &w, 0, 0).expect("arcs are gradable")
            })
            .collect();
        GradedDissection { arcs }
    }

    pub fn words(&self) -> Vec<CurveWord> {
        self.arcs.iter().map(|a| a.word.clone()).collect()
    }

    /// Order-independent form: canonical graded arcs, sorted.
    pub fn canonical(&self, s: &DissectedSurface) -> GradedDissection {
        let mut arcs: Vec<GradedCurve> = self.arcs.iter().map(|a| a.canonical(s)).collect();
        arcs.sort_by(|a, b| (&a.word.darts, &a.f).cmp(&(&b.word.darts, &b.f)));
        GradedDissection { arcs }
    }

    pub fn position(&self, s: &DissectedSurface, arc: &CurveWord) -> Option<usize> {
        self.arcs.iter().position(|a| a.word.same_curve(arc, s))
    }

    pub fn report(&self, s: &DissectedSurface) -> SiltingReport {
        let admissibility = check_admissible(s, &self.words());
        let witnesses = if self.arcs.iter().all(|a| !a.word.closed) { presilting_witnesses(s, &self.arcs) } else { vec![] };
        let admissible = admissibility.is_admissible();
        let presilting = witnesses.is_empty() && self.arcs.iter().all(|a| !a.word.closed);
        let silting = admissibility.is_dissection() && presilting;
        let tilting = silting && endpoints_compatible(s, &self.arcs);
        SiltingReport { admissibility, admissible, presilting, silting, tilting, witnesses }
    }

    pub fn is_silting(&self, s: &DissectedSurface) -> bool {
        check_admissible(s, &self.words()).is_dissection() && is_presilting(s, &self.arcs)
    }

    pub fn is_tilting(&self, s: &DissectedSurface) -> Result<bool, SiltingError> {
        if !self.is_silting(s) {
            return Err(SiltingError::NotSilting);
        }
        Ok(endpoints_compatible(s, &self.arcs))
    }
}

/// A graded dissection on file. Arc `i` is named `g{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DissectionDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub arcs: Vec<CurveDoc>,
}

pub fn arc_name(i: usize) -> String {
    format!("g{}", i + 1)
}

/// Position of an arc given as `g<k>` or as a zero-based index.
pub fn parse_arc_name(name: &str, n: usize) -> Option<usize> {
    let i = match name.strip_prefix('g') {
        Some(k) => k.parse::<usize>().ok()?.checked_sub(1)?,
        None => name.parse::<usize>().ok()?,
    };
    (i < n).then_some(i)
}

impl GradedDissection {
    pub fn to_doc(&self, s: &DissectedSurface) -> DissectionDoc {
        DissectionDoc { schema: Some(SCHEMA.to_string()), arcs: self.arcs.iter().map(|a| encode(s, a)).collect() }
    }

    pub fn from_doc(s: &DissectedSurface, doc: &DissectionDoc) -> Result<Self, CurveError> {
        if let Some(sc) = &doc.schema {
            if sc != SCHEMA {
                return Err(CurveError::Invalid(format!("unsupported schema `{sc}`")));
            }
        }
        let arcs = doc.arcs.iter().map(|d| decode(s, d)).collect::<Result<Vec<_>, _>>()?;
        if let Some(i) = arcs.iter().position(|a| a.word.closed) {
            return Err(CurveError::Invalid(format!("{} is a closed curve", arc_name(i))));
        }
        Ok(GradedDissection { arcs })
    }

    pub fn from_json(s: &DissectedSurface, text: &str) -> Result<Self, CurveError> {
        let doc: DissectionDoc = serde_json::from_str(text).map_err(|e| CurveError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_doc(s, &doc)
    }

    pub fn to_json(&self, s: &DissectedSurface) -> String {
        serde_json::to_string_pretty(&self.to_doc(s)).expect("dissection serializes")
    }
}

/// Grading values agree at every common endpoint, including the two ends of a loop.
pub fn endpoints_compatible(s: &DissectedSurface, arcs: &[GradedCurve]) -> bool {
    let ends: Vec<(usize, i64)> = arcs
        .iter()
        .flat_map(|a| (0..2).map(move |e| (a.word.endpoint(s, e).0, a.end_value(e))))
        .collect();
    let mut at: BTreeMap<usize, i64> = BTreeMap::new();
    for (q, v) in ends {
        if *at.entry(q).or_insert(v) != v {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::grade;
    use crate::surface::tests::{surf, A2, A3_REL, KRONECKER};

    #[test]
    fn initial_dissections_are_tilting() {
        for text in [A2, A3_REL, KRONECKER] {
            let s = surf(text);
            let gd = GradedDissection::initial(&s);
            assert_eq!(check_admissible(&s, &gd.words()), Admissibility::AdmissibleDissection);
            assert!(gd.is_silting(&s));
            assert_eq!(gd.is_tilting(&s), Ok(true));
        }
    }

    #[test]
    fn dropping_an_arc_leaves_a_collection() {
        let s = surf(A3_REL);
        let mut words = GradedDissection::initial(&s).words();
        words.pop();
        assert_eq!(check_admissible(&s, &words), Admissibility::AdmissibleCollection);
    }

    #[test]
    fn negative_shift_of_a_neighbour_breaks_presilting() {
        let s = surf(A2);
        let mut gd = GradedDissection::initial(&s);
        gd.arcs[1] = gd.arcs[1].shift(-1);
        let ws = presilting_witnesses(&s, &gd.arcs);
        assert!(!ws.is_empty());
        assert!(ws.iter().all(|w| w.degree == 1));
        assert!(!gd.is_silting(&s));
    }

    #[test]
    fn documents_round_trip() {
        let s = surf(A3_REL);
        let mut gd = GradedDissection::initial(&s);
        gd.arcs[1] = gd.arcs[1].shift(2);
        let back = GradedDissection::from_json(&s, &gd.to_json(&s)).unwrap();
        assert_eq!(back.canonical(&s), gd.canonical(&s));
        assert_eq!(parse_arc_name("g2", 3), Some(1));
        assert_eq!(parse_arc_name("0", 3), Some(0));
        assert_eq!(parse_arc_name("g4", 3), None);
        assert_eq!(parse_arc_name("g0", 3), None);
    }

    #[test]
    fn global_shift_keeps_silting() {
        let s = surf(A3_REL);
        let gd = GradedDissection::initial(&s);
        let shifted = GradedDissection { arcs: gd.arcs.iter().map(|a| a.shift(3)).collect() };
        assert!(shifted.is_silting(&s));
        let single = grade(&s, &gd.arcs[0].word, 0, 5).unwrap();
        assert!(is_presilting(&s, &[single]));
    }
}
