//! Gentle algebras: parsing, validation, nonzero paths and homotopy-string words.
//!
//! Paths compose left to right: `ab` is the path that runs through `a` and then `b`,
//! and a relation `(a, b)` means `ab = 0`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA: &str = "silt-surf/1";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ArrowDoc {
    pub id: String,
    pub source: String,
    pub target: String,
}

/// On-disk form of an algebra.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub vertices: Vec<String>,
    #[serde(default)]
    pub arrows: Vec<ArrowDoc>,
    #[serde(default)]
    pub relations: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoVertices,
    DuplicateVertex(String),
    DuplicateArrow(String),
    IdClash(String),
    UnknownVertex { arrow: String, vertex: String },
    UnknownArrow(String),
    DuplicateRelation(String, String),
    NotComposable(String, String),
    OutDegree { vertex: String, count: usize },
    InDegree { vertex: String, count: usize },
    TwoRelationsAfter(String),
    TwoContinuationsAfter(String),
    TwoRelationsBefore(String),
    TwoContinuationsBefore(String),
    InfiniteDimensional(Vec<String>),
    BadSchema(String),
}

impl Violation {
    /// The id whose first occurrence in the source text locates the problem.
    fn anchor(&self) -> Option<&str> {
        use Violation::*;
        match self {
            NoVertices => None,
            DuplicateVertex(v) | DuplicateArrow(v) | IdClash(v) | UnknownArrow(v) => Some(v),
            UnknownVertex { arrow, .. } => Some(arrow),
            DuplicateRelation(a, _) | NotComposable(a, _) => Some(a),
            OutDegree { vertex, .. } | InDegree { vertex, .. } => Some(vertex),
            TwoRelationsAfter(a)
            | TwoContinuationsAfter(a)
            | TwoRelationsBefore(a)
            | TwoContinuationsBefore(a) => Some(a),
            InfiniteDimensional(c) => c.first().map(|s| s.as_str()),
            BadSchema(s) => Some(s),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NoVertices => write!(f, "algebra has no vertices"),
            DuplicateVertex(v) => write!(f, "duplicate vertex id `{v}`"),
            DuplicateArrow(a) => write!(f, "duplicate arrow id `{a}`"),
            IdClash(x) => write!(f, "id `{x}` names both a vertex and an arrow"),
            UnknownVertex { arrow, vertex } => {
                write!(f, "arrow `{arrow}` refers to unknown vertex `{vertex}`")
            }
            UnknownArrow(a) => write!(f, "relation refers to unknown arrow `{a}`"),
            DuplicateRelation(a, b) => write!(f, "relation ({a},{b}) listed twice"),
            NotComposable(a, b) => {
                write!(f, "relation over non-composable pair ({a},{b}): target({a}) != source({b})")
            }
            OutDegree { vertex, count } => {
                write!(f, "out-degree > 2 at vertex `{vertex}` ({count} outgoing arrows)")
            }
            InDegree { vertex, count } => {
                write!(f, "in-degree > 2 at vertex `{vertex}` ({count} incoming arrows)")
            }
            TwoRelationsAfter(a) => write!(f, "two relations share the left factor `{a}`"),
            TwoContinuationsAfter(a) => {
                write!(f, "arrow `{a}` has two composable successors outside the relations")
            }
            TwoRelationsBefore(b) => write!(f, "two relations share the right factor `{b}`"),
            TwoContinuationsBefore(b) => {
                write!(f, "arrow `{b}` has two composable predecessors outside the relations")
            }
            InfiniteDimensional(cycle) => write!(
                f,
                "infinite-dimensional: oriented cycle {} contains no relation",
                cycle.join(" ")
            ),
            BadSchema(s) => write!(f, "unsupported schema `{s}`, expected `{SCHEMA}`"),
        }
    }
}

/// A violation together with the source line it was traced to, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub violation: Violation,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.violation),
            None => write!(f, "{}", self.violation),
        }
    }
}

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrow {
    pub id: String,
    pub source: usize,
    pub target: usize,
}

/// A validated, finite-dimensional gentle algebra. Vertices and arrows are stored in
/// lexicographic order of their ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GentleAlgebra {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
    pub relations: BTreeSet<(usize, usize)>,
}

impl GentleAlgebra {
    pub fn from_json(text: &str) -> Result<Self, AlgebraError> {
        let doc: AlgebraDoc = serde_json::from_str(text).map_err(|e| AlgebraError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::validate(&doc).map_err(|vs| {
            AlgebraError::Invalid(
                vs.into_iter()
                    .map(|v| Diagnostic { line: locate(text, v.anchor()), violation: v })
                    .collect(),
            )
        })
    }

    pub fn to_doc(&self) -> AlgebraDoc {
        AlgebraDoc {
            schema: Some(SCHEMA.to_string()),
            vertices: self.vertices.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| ArrowDoc {
                    id: a.id.clone(),
                    source: self.vertices[a.source].clone(),
                    target: self.vertices[a.target].clone(),
                })
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|&(a, b)| (self.arrows[a].id.clone(), self.arrows[b].id.clone()))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("algebra serializes")
    }

    /// Check every gentleness clause, returning all violations found.
    pub fn validate(doc: &AlgebraDoc) -> Result<Self, Vec<Violation>> {
        let mut out = Vec::new();
        if let Some(s) = &doc.schema {
            if s != SCHEMA {
                out.push(Violation::BadSchema(s.clone()));
            }
        }
        if doc.vertices.is_empty() {
            out.push(Violation::NoVertices);
        }
        let mut vset = BTreeSet::new();
        for v in &doc.vertices {
            if !vset.insert(v.clone()) {
                out.push(Violation::DuplicateVertex(v.clone()));
            }
        }
        let vertices: Vec<String> = vset.iter().cloned().collect();
        let vidx: HashMap<&str, usize> =
            vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();

        let mut amap: BTreeMap<String, &ArrowDoc> = BTreeMap::new();
        for a in &doc.arrows {
            if amap.insert(a.id.clone(), a).is_some() {
                out.push(Violation::DuplicateArrow(a.id.clone()));
            }
            if vset.contains(&a.id) {
                out.push(Violation::IdClash(a.id.clone()));
            }
        }
        let mut arrows = Vec::new();
        for (id, a) in &amap {
            let s = vidx.get(a.source.as_str());
            let t = vidx.get(a.target.as_str());
            for (end, found) in [(&a.source, s), (&a.target, t)] {
                if found.is_none() {
                    out.push(Violation::UnknownVertex { arrow: id.clone(), vertex: end.clone() });
                }
            }
            if let (Some(&s), Some(&t)) = (s, t) {
                arrows.push(Arrow { id: id.clone(), source: s, target: t });
            }
        }
        let aidx: HashMap<&str, usize> =
            arrows.iter().enumerate().map(|(i, a)| (a.id.as_str(), i)).collect();

        let mut relations = BTreeSet::new();
        for (a, b) in &doc.relations {
            let (ia, ib) = (aidx.get(a.as_str()), aidx.get(b.as_str()));
            if ia.is_none() && !amap.contains_key(a) {
                out.push(Violation::UnknownArrow(a.clone()));
            }
            if ib.is_none() && !amap.contains_key(b) {
                out.push(Violation::UnknownArrow(b.clone()));
            }
            if let (Some(&ia), Some(&ib)) = (ia, ib) {
                if arrows[ia].target != arrows[ib].source {
                    out.push(Violation::NotComposable(a.clone(), b.clone()));
                } else if !relations.insert((ia, ib)) {
                    out.push(Violation::DuplicateRelation(a.clone(), b.clone()));
                }
            }
        }

        for (v, name) in vertices.iter().enumerate() {
            let o = arrows.iter().filter(|a| a.source == v).count();
            let i = arrows.iter().filter(|a| a.target == v).count();
            if o > 2 {
                out.push(Violation::OutDegree { vertex: name.clone(), count: o });
            }
            if i > 2 {
                out.push(Violation::InDegree { vertex: name.clone(), count: i });
            }
        }
        for (ia, a) in arrows.iter().enumerate() {
            let after: Vec<usize> = (0..arrows.len()).filter(|&b| arrows[b].source == a.target).collect();
            let rel = after.iter().filter(|&&b| relations.contains(&(ia, b))).count();
            if rel > 1 {
                out.push(Violation::TwoRelationsAfter(a.id.clone()));
            }
            if after.len() - rel > 1 {
                out.push(Violation::TwoContinuationsAfter(a.id.clone()));
            }
            let before: Vec<usize> = (0..arrows.len()).filter(|&b| arrows[b].target == a.source).collect();
            let rel = before.iter().filter(|&&b| relations.contains(&(b, ia))).count();
            if rel > 1 {
                out.push(Violation::TwoRelationsBefore(a.id.clone()));
            }
            if before.len() - rel > 1 {
                out.push(Violation::TwoContinuationsBefore(a.id.clone()));
            }
        }

        if !out.is_empty() {
            return Err(out);
        }
        let alg = GentleAlgebra { vertices, arrows, relations };
        if let Some(cycle) = alg.unbounded_cycle() {
            return Err(vec![Violation::InfiniteDimensional(
                cycle.into_iter().map(|a| alg.arrows[a].id.clone()).collect(),
            )]);
        }
        Ok(alg)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.binary_search_by(|v| v.as_str().cmp(id)).ok()
    }

    pub fn arrow_index(&self, id: &str) -> Option<usize> {
        self.arrows.binary_search_by(|a| a.id.as_str().cmp(id)).ok()
    }

    pub fn out_arrows(&self, v: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&a| self.arrows[a].source == v).collect()
    }

    pub fn in_arrows(&self, v: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&a| self.arrows[a].target == v).collect()
    }

    pub fn is_relation(&self, a: usize, b: usize) -> bool {
        self.relations.contains(&(a, b))
    }

    /// The unique arrow `b` with `ab` a nonzero path, if any.
    pub fn successor(&self, a: usize) -> Option<usize> {
        let t = self.arrows[a].target;
        (0..self.arrows.len()).find(|&b| self.arrows[b].source == t && !self.is_relation(a, b))
    }

    /// The unique arrow `a` with `ab` a nonzero path, if any.
    pub fn predecessor(&self, b: usize) -> Option<usize> {
        let s = self.arrows[b].source;
        (0..self.arrows.len()).find(|&a| self.arrows[a].target == s && !self.is_relation(a, b))
    }

    /// An oriented cycle along which no consecutive pair is a relation.
    fn unbounded_cycle(&self) -> Option<Vec<usize>> {
        for start in 0..self.arrows.len() {
            let mut seen = vec![start];
            let mut cur = start;
            while let Some(next) = self.successor(cur) {
                if next == start {
                    return Some(seen);
                }
                if seen.contains(&next) {
                    break;
                }
                seen.push(next);
                cur = next;
            }
        }
        None
    }

    pub fn path_is_nonzero(&self, arrows: &[usize]) -> bool {
        arrows.windows(2).all(|w| {
            self.arrows[w[0]].target == self.arrows[w[1]].source && !self.is_relation(w[0], w[1])
        })
    }

    /// All nonzero paths, trivial ones first.
    pub fn paths(&self) -> PathBasis {
        let mut list: Vec<Path> = (0..self.n_vertices())
            .map(|v| Path { source: v, target: v, arrows: vec![] })
            .collect();
        let mut frontier: Vec<Vec<usize>> = (0..self.arrows.len()).map(|a| vec![a]).collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for p in frontier {
                let last = *p.last().unwrap();
                list.push(Path {
                    source: self.arrows[p[0]].source,
                    target: self.arrows[last].target,
                    arrows: p.clone(),
                });
                if let Some(b) = self.successor(last) {
                    let mut q = p;
                    q.push(b);
                    next.push(q);
                }
            }
            frontier = next;
        }
        let index = list.iter().enumerate().map(|(i, p)| (p.key(), i)).collect();
        PathBasis { paths: list, index }
    }

    /// Algebras are compared up to renaming through this form.
    pub fn canonical_shape(&self) -> (usize, Vec<(usize, usize)>, usize) {
        let mut edges: Vec<_> = self.arrows.iter().map(|a| (a.source, a.target)).collect();
        edges.sort();
        (self.n_vertices(), edges, self.relations.len())
    }
}

fn locate(text: &str, needle: Option<&str>) -> Option<usize> {
    let quoted = format!("\"{}\"", needle?);
    text.lines().position(|l| l.contains(&quoted)).map(|i| i + 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub source: usize,
    pub target: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    fn key(&self) -> (usize, Vec<usize>) {
        (self.source, self.arrows.clone())
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }
}

/// The basis of nonzero paths of a gentle algebra, with composition.
#[derive(Debug, Clone)]
pub struct PathBasis {
    pub paths: Vec<Path>,
    index: HashMap<(usize, Vec<usize>), usize>,
}

impl PathBasis {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn trivial(&self, v: usize) -> usize {
        v
    }

    pub fn find(&self, source: usize, arrows: &[usize]) -> Option<usize> {
        self.index.get(&(source, arrows.to_vec())).copied()
    }

    /// `p` followed by `q`, or `None` when the product vanishes.
    pub fn compose(&self, alg: &GentleAlgebra, p: usize, q: usize) -> Option<usize> {
        let (pp, qq) = (&self.paths[p], &self.paths[q]);
        if pp.target != qq.source {
            return None;
        }
        if pp.is_trivial() {
            return Some(q);
        }
        if qq.is_trivial() {
            return Some(p);
        }
        let (a, b) = (*pp.arrows.last().unwrap(), qq.arrows[0]);
        if alg.is_relation(a, b) {
            return None;
        }
        let mut joined = pp.arrows.clone();
        joined.extend_from_slice(&qq.arrows);
        self.find(pp.source, &joined)
    }

    pub fn between(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.paths.len())
            .filter(|&i| self.paths[i].source == x && self.paths[i].target == y)
            .collect()
    }
}

/// One letter of a homotopy string: a nonzero path read forwards or backwards.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub path: Vec<usize>,
    pub inverse: bool,
}

impl Letter {
    fn from_vertex(&self, alg: &GentleAlgebra) -> usize {
        if self.inverse {
            alg.arrows[*self.path.last().unwrap()].target
        } else {
            alg.arrows[self.path[0]].source
        }
    }

    fn to_vertex(&self, alg: &GentleAlgebra) -> usize {
        if self.inverse {
            alg.arrows[self.path[0]].source
        } else {
            alg.arrows[*self.path.last().unwrap()].target
        }
    }

    fn flipped(&self) -> Letter {
        Letter { path: self.path.clone(), inverse: !self.inverse }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StringError {
    #[error("not reduced: {0}")]
    NotReduced(String),
    #[error("invalid string: {0}")]
    Invalid(String),
}

/// A homotopy string (`closed == false`) or band word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StringWord {
    pub closed: bool,
    pub start: usize,
    pub letters: Vec<Letter>,
}

impl StringWord {
    pub fn trivial(v: usize) -> Self {
        StringWord { closed: false, start: v, letters: vec![] }
    }

    pub fn end(&self, alg: &GentleAlgebra) -> usize {
        self.letters.last().map_or(self.start, |l| l.to_vertex(alg))
    }

    pub fn vertices(&self, alg: &GentleAlgebra) -> Vec<usize> {
        let mut vs = vec![self.start];
        for l in &self.letters {
            vs.push(l.to_vertex(alg));
        }
        if self.closed {
            vs.pop();
        }
        vs
    }

    pub fn check(&self, alg: &GentleAlgebra) -> Result<(), StringError> {
        if self.closed && self.letters.is_empty() {
            return Err(StringError::Invalid("band word without letters".into()));
        }
        let mut at = self.start;
        for l in &self.letters {
            if l.path.is_empty() || !alg.path_is_nonzero(&l.path) {
                return Err(StringError::Invalid("letter is not a nonzero path".into()));
            }
            if l.from_vertex(alg) != at {
                return Err(StringError::Invalid("letters do not chain".into()));
            }
            at = l.to_vertex(alg);
        }
        if self.closed && at != self.start {
            return Err(StringError::Invalid("band word does not close up".into()));
        }
        let n = self.letters.len();
        let pairs = if self.closed { n } else { n.saturating_sub(1) };
        for i in 0..pairs {
            joint_ok(alg, &self.letters[i], &self.letters[(i + 1) % n])?;
        }
        Ok(())
    }

    pub fn reversed(&self, alg: &GentleAlgebra) -> StringWord {
        if self.closed {
            let letters = self.letters.iter().rev().map(Letter::flipped).collect();
            return StringWord { closed: true, start: self.start, letters };
        }
        StringWord {
            closed: false,
            start: self.end(alg),
            letters: self.letters.iter().rev().map(Letter::flipped).collect(),
        }
    }

    /// A representative independent of orientation (and of rotation for bands).
    pub fn canonical(&self, alg: &GentleAlgebra) -> StringWord {
        let rev = self.reversed(alg);
        if !self.closed {
            let key = |w: &StringWord| (w.start, w.letters.clone());
            return if key(&rev) < key(self) { rev } else { self.clone() };
        }
        let mut best: Option<StringWord> = None;
        for w in [self, &rev] {
            for r in 0..w.letters.len() {
                let mut letters = w.letters.clone();
                letters.rotate_left(r);
                let start = letters[0].from_vertex(alg);
                let cand = StringWord { closed: true, start, letters };
                let better = match &best {
                    None => true,
                    Some(b) => (cand.start, &cand.letters) < (b.start, &b.letters),
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        best.unwrap()
    }

    pub fn display(&self, alg: &GentleAlgebra) -> String {
        if self.letters.is_empty() {
            return format!("e_{}", alg.vertices[self.start]);
        }
        let body = self
            .letters
            .iter()
            .map(|l| {
                let p = l.path.iter().map(|&a| alg.arrows[a].id.as_str()).collect::<Vec<_>>().join(".");
                if l.inverse {
                    format!("({p})^-1")
                } else {
                    p
                }
            })
            .collect::<Vec<_>>()
            .join(" ");
        if self.closed {
            format!("[{body}]")
        } else {
            body
        }
    }
}

/// Rules for two consecutive letters of a homotopy string.
fn joint_ok(alg: &GentleAlgebra, x: &Letter, y: &Letter) -> Result<(), StringError> {
    match (x.inverse, y.inverse) {
        (false, false) => {
            let (a, b) = (*x.path.last().unwrap(), y.path[0]);
            if !alg.is_relation(a, b) {
                return Err(StringError::Invalid("consecutive direct letters compose".into()));
            }
        }
        (true, true) => {
            let (a, b) = (*y.path.last().unwrap(), x.path[0]);
            if !alg.is_relation(a, b) {
                return Err(StringError::Invalid("consecutive inverse letters compose".into()));
            }
        }
        (false, true) => {
            if x.path.last() == y.path.last() {
                return Err(StringError::NotReduced("letter followed by its inverse".into()));
            }
        }
        (true, false) => {
            if x.path[0] == y.path[0] {
                return Err(StringError::NotReduced("inverse letter followed by itself".into()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(text: &str) -> Result<GentleAlgebra, AlgebraError> {
        GentleAlgebra::from_json(text)
    }

    #[test]
    fn a2_is_valid() {
        let a = alg(r#"{"vertices":["1","2"],"arrows":[{"id":"a","source":"1","target":"2"}]}"#).unwrap();
        assert_eq!(a.n_vertices(), 2);
        assert_eq!(a.paths().len(), 3);
    }

    #[test]
    fn a3_with_relation_is_valid() {
        let a = alg(r#"{"vertices":["1","2","3"],
            "arrows":[{"id":"a","source":"1","target":"2"},{"id":"b","source":"2","target":"3"}],
            "relations":[["a","b"]]}"#)
        .unwrap();
        assert_eq!(a.paths().len(), 5);
        let without = alg(r#"{"vertices":["1","2","3"],
            "arrows":[{"id":"a","source":"1","target":"2"},{"id":"b","source":"2","target":"3"}]}"#)
        .unwrap();
        assert_eq!(without.paths().len(), 6);
    }

    #[test]
    fn three_outgoing_arrows_rejected() {
        let text = r#"{
  "vertices": ["1","2","3","4"],
  "arrows": [
    {"id":"a","source":"1","target":"2"},
    {"id":"b","source":"1","target":"3"},
    {"id":"c","source":"1","target":"4"}
  ]
}"#;
        match alg(text) {
            Err(AlgebraError::Invalid(ds)) => {
                assert!(ds.iter().any(|d| d.to_string().contains("out-degree > 2")));
                let d = ds.iter().find(|d| matches!(d.violation, Violation::OutDegree { .. })).unwrap();
                assert_eq!(d.line, Some(2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_position() {
        match alg("{\n \"vertices\": [\"1\",\n}") {
            Err(AlgebraError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            alg(r#"{"vertices":["1"],"colour":"red"}"#),
            Err(AlgebraError::Parse { .. })
        ));
    }

    #[test]
    fn each_clause_is_reported() {
        let cases = [
            (r#"{"vertices":["1","1"]}"#, "duplicate vertex"),
            (r#"{"vertices":["1","2"],"arrows":[{"id":"a","source":"1","target":"2"},{"id":"a","source":"1","target":"2"}]}"#, "duplicate arrow"),
            (r#"{"vertices":["1","2"],"arrows":[{"id":"a","source":"1","target":"9"}]}"#, "unknown vertex"),
            (r#"{"vertices":["1","2"],"arrows":[{"id":"a","source":"1","target":"2"}],"relations":[["a","a"]]}"#, "non-composable"),
            (r#"{"vertices":["1","2","3"],"arrows":[{"id":"a","source":"1","target":"2"},{"id":"b","source":"2","target":"3"},{"id":"c","source":"2","target":"3"}],"relations":[["a","b"],["a","c"]]}"#, "left factor"),
            (r#"{"vertices":["1","2","3"],"arrows":[{"id":"a","source":"1","target":"2"},{"id":"b","source":"2","target":"3"},{"id":"c","source":"2","target":"3"}]}"#, "two composable successors"),
            (r#"{"vertices":["1"],"arrows":[{"id":"x","source":"1","target":"1"}]}"#, "infinite-dimensional"),
        ];
        for (text, needle) in cases {
            let err = alg(text).unwrap_err().to_string();
            assert!(err.contains(needle), "{needle}: {err}");
        }
        let loop_ok = alg(r#"{"vertices":["1"],"arrows":[{"id":"x","source":"1","target":"1"}],"relations":[["x","x"]]}"#);
        assert!(loop_ok.is_ok());
    }

    #[test]
    fn composition_follows_relations() {
        let a = alg(r#"{"vertices":["1","2","3"],
            "arrows":[{"id":"a","source":"1","target":"2"},{"id":"b","source":"2","target":"3"}],
            "relations":[["a","b"]]}"#)
        .unwrap();
        let pb = a.paths();
        let pa = pb.find(0, &[0]).unwrap();
        let pbb = pb.find(1, &[1]).unwrap();
        assert_eq!(pb.compose(&a, pa, pbb), None);
        assert_eq!(pb.compose(&a, pb.trivial(0), pa), Some(pa));
        assert_eq!(pb.compose(&a, pbb, pa), None);
    }

    #[test]
    fn string_rules() {
        let a = alg(r#"{"vertices":["1","2"],"arrows":[{"id":"a","source":"1","target":"2"},{"id":"b","source":"1","target":"2"}]}"#).unwrap();
        let band = StringWord {
            closed: true,
            start: 0,
            letters: vec![Letter { path: vec![0], inverse: false }, Letter { path: vec![1], inverse: true }],
        };
        band.check(&a).unwrap();
        let bad = StringWord {
            closed: false,
            start: 0,
            letters: vec![Letter { path: vec![0], inverse: false }, Letter { path: vec![0], inverse: true }],
        };
        assert!(matches!(bad.check(&a), Err(StringError::NotReduced(_))));
        assert_eq!(band.canonical(&a), band.reversed(&a).canonical(&a));
    }
}
