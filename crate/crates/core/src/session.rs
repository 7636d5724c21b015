//! Session state behind the command line and the HTTP service, with the JSON documents
//! both of them emit.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraDoc, AlgebraError, GentleAlgebra, SCHEMA};
use crate::curves::{encode, CurveDoc, CurveError, GradedCurve};
use crate::homs::{hom_table, records, IntersectionRecord};
use crate::mutation::{self, classify_case, tilting_preserved, CaseTag, Direction, ExchangeTriangle, MutationError};
use crate::reduction::{self, CutDoc, OrbitDescriptor, Pattern, ReductionError, Run};
use crate::silting::{arc_name, parse_arc_name, DissectionDoc, GradedDissection, SiltingReport};
use crate::surface::{DissectedSurface, SurfaceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Parse,
    Validation,
    Precondition,
}

/// An error with its class: parse errors exit with 1, validation failures with 2 and
/// violated mathematical preconditions with 3.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub kind: FailureKind,
    pub message: String,
}

impl Failure {
    pub fn parse(message: impl Into<String>) -> Self {
        Failure { kind: FailureKind::Parse, message: message.into() }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Failure { kind: FailureKind::Validation, message: message.into() }
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        Failure { kind: FailureKind::Precondition, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            FailureKind::Parse => 1,
            FailureKind::Validation => 2,
            FailureKind::Precondition => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::Parse { .. } => Failure::parse(e.to_string()),
            AlgebraError::Invalid(_) => Failure::validation(e.to_string()),
        }
    }
}

impl From<CurveError> for Failure {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::Parse { .. } => Failure::parse(e.to_string()),
            _ => Failure::validation(e.to_string()),
        }
    }
}

impl From<SurfaceError> for Failure {
    fn from(e: SurfaceError) -> Self {
        Failure::validation(e.to_string())
    }
}

impl From<ReductionError> for Failure {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::Curve(c) => c.into(),
            other => Failure::precondition(other.to_string()),
        }
    }
}

impl From<MutationError> for Failure {
    fn from(e: MutationError) -> Self {
        match e {
            MutationError::NoSuchArc(_) => Failure::validation(e.to_string()),
            MutationError::Curve(c) => c.into(),
            other => Failure::precondition(other.to_string()),
        }
    }
}

pub fn load_algebra(text: &str) -> Result<(GentleAlgebra, DissectedSurface), Failure> {
    let alg = GentleAlgebra::from_json(text)?;
    let s = DissectedSurface::from_algebra(&alg)?;
    Ok((alg, s))
}

pub fn arc_index(gd: &GradedDissection, name: &str) -> Result<usize, Failure> {
    parse_arc_name(name, gd.arcs.len())
        .ok_or_else(|| Failure::validation(format!("no arc `{name}`; arcs are g1..g{}", gd.arcs.len())))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EndValue {
    pub point: String,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MutationPreview {
    #[serde(rename = "caseTag")]
    pub case_tag: CaseTag,
    pub neighbours: Vec<String>,
    /// Whether the mutation keeps a tilting dissection tilting; absent when the current
    /// dissection is not tilting.
    #[serde(rename = "tiltingPreserved", skip_serializing_if = "Option::is_none")]
    pub tilting_preserved: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArcState {
    pub name: String,
    pub ends: Vec<EndValue>,
    pub left: MutationPreview,
    pub right: MutationPreview,
}

pub fn preview(s: &DissectedSurface, gd: &GradedDissection, idx: usize, dir: Direction) -> MutationPreview {
    let (case_tag, ns) = classify_case(s, gd, idx, dir).expect("index checked");
    let tilting = gd.is_tilting(s).unwrap_or(false);
    MutationPreview {
        case_tag,
        neighbours: ns.iter().map(|n| arc_name(n.arc)).collect(),
        tilting_preserved: tilting.then(|| tilting_preserved(s, gd, idx, dir).expect("tilting checked")),
    }
}

pub fn arc_states(s: &DissectedSurface, gd: &GradedDissection) -> Vec<ArcState> {
    gd.arcs
        .iter()
        .enumerate()
        .map(|(i, a)| ArcState {
            name: arc_name(i),
            ends: (0..2)
                .map(|e| EndValue { point: s.circ_name(a.word.endpoint(s, e).0), value: a.end_value(e) })
                .collect(),
            left: preview(s, gd, i, Direction::Left),
            right: preview(s, gd, i, Direction::Right),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessDoc {
    pub name: String,
    pub from: String,
    pub to: String,
    pub point: String,
    pub degree: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExchangeDoc {
    pub schema: String,
    pub arc: String,
    pub direction: Direction,
    #[serde(rename = "caseTag")]
    pub case_tag: CaseTag,
    pub source: CurveDoc,
    pub middles: Vec<CurveDoc>,
    pub target: CurveDoc,
    pub witnesses: Vec<WitnessDoc>,
    pub tilting: bool,
}

pub fn exchange_doc(s: &DissectedSurface, ex: &ExchangeTriangle, result: &GradedDissection) -> ExchangeDoc {
    ExchangeDoc {
        schema: SCHEMA.to_string(),
        arc: arc_name(ex.arc),
        direction: ex.direction,
        case_tag: ex.case_tag,
        source: encode(s, &ex.source),
        middles: ex.middles.iter().map(|m| encode(s, m)).collect(),
        target: encode(s, &ex.target),
        witnesses: ex
            .witnesses
            .iter()
            .map(|w| WitnessDoc {
                name: w.name.clone(),
                from: w.from.clone(),
                to: w.to.clone(),
                point: w.point.clone(),
                degree: w.degree,
            })
            .collect(),
        tilting: result.is_tilting(s).unwrap_or(false),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomDoc {
    pub schema: String,
    #[serde(rename = "perDegree")]
    pub per_degree: BTreeMap<i64, usize>,
    pub total: usize,
    pub records: Vec<IntersectionRecord>,
}

pub fn hom_doc(s: &DissectedSurface, x: &GradedCurve, y: &GradedCurve) -> Result<HomDoc, Failure> {
    let t = hom_table(s, x, y)?;
    Ok(HomDoc { schema: SCHEMA.to_string(), per_degree: t.per_degree, total: t.total, records: records(s, x, y) })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitEntryDoc {
    pub step: i64,
    pub member: usize,
    pub offset: i64,
    pub curve: CurveDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitDoc {
    pub schema: String,
    pub gamma: CurveDoc,
    pub class: Vec<Vec<String>>,
    pub table: Vec<OrbitEntryDoc>,
    pub runs: Vec<Run>,
    pub pattern: Pattern,
    pub predicted: Pattern,
    pub excluded: Vec<usize>,
    pub representative: CurveDoc,
}

pub fn orbit_doc(s: &DissectedSurface, gamma: &GradedCurve, o: &OrbitDescriptor) -> OrbitDoc {
    OrbitDoc {
        schema: SCHEMA.to_string(),
        gamma: encode(s, gamma),
        class: o
            .class
            .iter()
            .map(|w| w.crossings().iter().map(|&v| s.algebra.vertices[v].clone()).collect())
            .collect(),
        table: o
            .table
            .iter()
            .map(|e| OrbitEntryDoc { step: e.step, member: e.member, offset: e.offset, curve: encode(s, &e.curve) })
            .collect(),
        runs: o.runs.clone(),
        pattern: o.pattern,
        predicted: o.predicted,
        excluded: o.excluded.clone(),
        representative: encode(s, &o.representative(s)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Step {
    Mutate { arc: String, direction: Direction },
    Cut { arc: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateDoc {
    pub schema: String,
    pub algebra: AlgebraDoc,
    pub dissection: DissectionDoc,
    pub arcs: Vec<ArcState>,
    pub report: SiltingReport,
    pub history: Vec<Step>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cut: Option<CutDoc>,
}

#[derive(Debug, Clone)]
struct Snapshot {
    current: GradedDissection,
    cut: Option<(usize, CutDoc)>,
}

/// A loaded algebra with its current silting dissection, the last cut and an undo stack.
/// The current dissection is always silting.
#[derive(Debug, Clone)]
pub struct Session {
    pub algebra: GentleAlgebra,
    pub surface: DissectedSurface,
    pub current: GradedDissection,
    cut: Option<(usize, CutDoc)>,
    history: Vec<Step>,
    undo: Vec<Snapshot>,
}

impl Session {
    /// Load an algebra, starting from the initial dissection unless one is given.
    pub fn load(algebra: &str, dissection: Option<&str>) -> Result<Self, Failure> {
        let (alg, s) = load_algebra(algebra)?;
        let current = match dissection {
            Some(text) => GradedDissection::from_json(&s, text)?,
            None => GradedDissection::initial(&s),
        };
        if !current.is_silting(&s) {
            return Err(Failure::precondition("the dissection is not silting"));
        }
        Ok(Session { algebra: alg, surface: s, current, cut: None, history: Vec::new(), undo: Vec::new() })
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot { current: self.current.clone(), cut: self.cut.clone() }
    }

    pub fn mutate(&mut self, arc: &str, direction: Direction) -> Result<ExchangeDoc, Failure> {
        let s = &self.surface;
        let idx = arc_index(&self.current, arc)?;
        let (next, ex) = mutation::mutate(s, &self.current, idx, direction)?;
        let doc = exchange_doc(s, &ex, &next);
        self.undo.push(self.snapshot());
        self.current = next;
        self.cut = None;
        self.history.push(Step::Mutate { arc: arc_name(idx), direction });
        Ok(doc)
    }

    pub fn cut(&mut self, arc: &str) -> Result<CutDoc, Failure> {
        let s = &self.surface;
        let idx = arc_index(&self.current, arc)?;
        let c = reduction::cut(s, &self.current.arcs[idx].word)?;
        let doc = c.dump(s);
        self.undo.push(self.snapshot());
        self.cut = Some((idx, doc.clone()));
        self.history.push(Step::Cut { arc: arc_name(idx) });
        Ok(doc)
    }

    /// The orbit of a curve under `⟨1⟩` in the reduction at the last cut arc.
    pub fn orbit(&self, curve: &serde_json::Value) -> Result<OrbitDoc, Failure> {
        let Some((idx, _)) = &self.cut else {
            return Err(Failure::precondition("no arc has been cut"));
        };
        let s = &self.surface;
        let x = crate::curves::from_value(s, curve)?;
        let g = &self.current.arcs[*idx];
        let o = reduction::orbit_of(s, &x, g)?;
        Ok(orbit_doc(s, g, &o))
    }

    pub fn hom(&self, src: &str, dst: &str) -> Result<HomDoc, Failure> {
        let (i, j) = (arc_index(&self.current, src)?, arc_index(&self.current, dst)?);
        hom_doc(&self.surface, &self.current.arcs[i], &self.current.arcs[j])
    }

    pub fn undo(&mut self) -> Result<(), Failure> {
        let snap = self.undo.pop().ok_or_else(|| Failure::precondition("nothing to undo"))?;
        self.current = snap.current;
        self.cut = snap.cut;
        self.history.pop();
        Ok(())
    }

    pub fn apply(&mut self, step: &Step) -> Result<(), Failure> {
        match step {
            Step::Mutate { arc, direction } => self.mutate(arc, *direction).map(|_| ()),
            Step::Cut { arc } => self.cut(arc).map(|_| ()),
        }
    }

    pub fn history(&self) -> &[Step] {
        &self.history
    }

    pub fn state(&self) -> StateDoc {
        let s = &self.surface;
        StateDoc {
            schema: SCHEMA.to_string(),
            algebra: self.algebra.to_doc(),
            dissection: self.current.to_doc(s),
            arcs: arc_states(s, &self.current),
            report: self.current.report(s),
            history: self.history.clone(),
            cut: self.cut.as_ref().map(|(_, d)| d.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::tests::{A2, A3_REL};

    #[test]
    fn mutate_then_undo_restores_the_state() {
        let mut s = Session::load(A3_REL, None).unwrap();
        let before = serde_json::to_string(&s.state()).unwrap();
        s.mutate("g1", Direction::Left).unwrap();
        s.cut("g2").unwrap();
        assert_eq!(s.history().len(), 2);
        s.undo().unwrap();
        s.undo().unwrap();
        assert_eq!(serde_json::to_string(&s.state()).unwrap(), before);
        assert_eq!(s.undo().unwrap_err().exit_code(), 3);
    }

    #[test]
    fn failures_carry_their_class() {
        assert_eq!(Session::load("{", None).unwrap_err().exit_code(), 1);
        let bad = r#"{"vertices":["1"],"arrows":[{"id":"a","source":"1","target":"2"}],"relations":[]}"#;
        assert_eq!(Session::load(bad, None).unwrap_err().exit_code(), 2);
        let mut s = Session::load(A2, None).unwrap();
        assert_eq!(s.mutate("g9", Direction::Left).unwrap_err().exit_code(), 2);
        assert_eq!(s.orbit(&serde_json::json!({})).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn replayed_history_gives_the_same_state() {
        let mut s = Session::load(A3_REL, None).unwrap();
        for (arc, d) in [("g1", Direction::Left), ("g2", Direction::Right), ("g3", Direction::Left)] {
            s.mutate(arc, d).unwrap();
        }
        s.cut("g1").unwrap();
        let mut t = Session::load(A3_REL, None).unwrap();
        for step in s.history().to_vec() {
            t.apply(&step).unwrap();
        }
        assert_eq!(serde_json::to_string(&t.state()).unwrap(), serde_json::to_string(&s.state()).unwrap());
    }
}
