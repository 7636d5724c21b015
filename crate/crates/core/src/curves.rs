//! Graded curves on the dissected surface, stored as reduced words of darts.
//!
//! A word lists, for every crossing with the dual dissection, the dart through which the
//! curve leaves the current dual polygon. Arcs start and end at the ∘ points of their
//! first and last polygons.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Letter, StringError, StringWord, SCHEMA};
use crate::cells::{CellError, Visit, Walk};
use crate::surface::{opp, DissectedSurface};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid curve: {0}")]
    Invalid(String),
    #[error("not reduced")]
    NotReduced,
    #[error("contractible")]
    Contractible,
    #[error("not gradable: winding number {0}")]
    NotGradable(i64),
    #[error("infinite arc: the curve wraps the puncture {0} and is not a perfect object")]
    InfiniteArc(String),
    #[error("ambiguous crossing word: {0} readings fit, add \"slots\"")]
    Ambiguous(usize),
}

impl From<CellError> for CurveError {
    fn from(e: CellError) -> Self {
        match e {
            CellError::Contractible => CurveError::Contractible,
            other => CurveError::Invalid(other.to_string()),
        }
    }
}

impl From<StringError> for CurveError {
    fn from(e: StringError) -> Self {
        match e {
            StringError::NotReduced(_) => CurveError::NotReduced,
            StringError::Invalid(m) => CurveError::Invalid(m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CurveWord {
    pub closed: bool,
    pub darts: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Band {
    pub lambda: i64,
    pub n: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GradedCurve {
    pub word: CurveWord,
    pub f: Vec<i64>,
    pub band: Option<Band>,
}

impl CurveWord {
    pub fn arc(darts: Vec<usize>) -> Self {
        CurveWord { closed: false, darts }
    }

    pub fn closed(darts: Vec<usize>) -> Self {
        CurveWord { closed: true, darts }
    }

    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    pub fn crossings(&self) -> Vec<usize> {
        self.darts.iter().map(|d| d / 2).collect()
    }

    pub fn walk(&self, s: &DissectedSurface) -> Walk {
        if self.closed {
            return Walk::closed(self.darts.clone());
        }
        let q0 = s.dart_loc[self.darts[0]].0;
        let q1 = s.dart_loc[opp(*self.darts.last().unwrap())].0;
        Walk { closed: false, start: (q0, 0), end: (q1, 0), ports: self.darts.clone() }
    }

    pub fn from_walk(w: &Walk) -> Self {
        CurveWord { closed: w.closed, darts: w.ports.clone() }
    }

    pub fn visits(&self, s: &DissectedSurface) -> Vec<Visit> {
        s.cells.visits(&self.walk(s)).expect("words on the base surface are consistent")
    }

    /// Polygons strictly between consecutive crossings, as (∘ point, entry slot, exit
    /// slot). For a closed word entry `i` lies between crossings `i` and `i + 1`.
    pub fn inner_steps(&self, s: &DissectedSurface) -> Vec<(usize, usize, usize)> {
        let k = self.darts.len();
        let n = if self.closed { k } else { k.saturating_sub(1) };
        (0..n)
            .map(|i| {
                let a = opp(self.darts[i]);
                let b = self.darts[(i + 1) % k];
                let (q, sa) = s.dart_loc[a];
                (q, sa, s.dart_loc[b].1)
            })
            .collect()
    }

    /// `true` for L: the ∘ point lies to the left of the direction of travel.
    pub fn sides(&self, s: &DissectedSurface) -> Vec<bool> {
        self.inner_steps(s).iter().map(|&(_, a, b)| a < b).collect()
    }

    pub fn winding_number(&self, s: &DissectedSurface) -> i64 {
        self.sides(s).iter().map(|&l| if l { 1 } else { -1 }).sum()
    }

    pub fn reversed(&self) -> CurveWord {
        CurveWord { closed: self.closed, darts: self.darts.iter().rev().map(|&d| opp(d)).collect() }
    }

    /// Endpoint `e` (0 = start, 1 = end) as (∘ point, slot of the crossed dart).
    pub fn endpoint(&self, s: &DissectedSurface, e: usize) -> (usize, usize) {
        assert!(!self.closed);
        if e == 0 {
            s.dart_loc[self.darts[0]]
        } else {
            s.dart_loc[opp(*self.darts.last().unwrap())]
        }
    }

    /// Crossing index nearest to endpoint `e`.
    pub fn end_crossing(&self, e: usize) -> usize {
        if e == 0 {
            0
        } else {
            self.darts.len() - 1
        }
    }

    pub fn is_loop(&self, s: &DissectedSurface) -> bool {
        !self.closed && self.endpoint(s, 0).0 == self.endpoint(s, 1).0
    }

    pub fn canonical(&self, s: &DissectedSurface) -> CurveWord {
        CurveWord::from_walk(&s.cells.canonical(&self.walk(s)))
    }

    pub fn same_curve(&self, other: &CurveWord, s: &DissectedSurface) -> bool {
        self.closed == other.closed && self.canonical(s) == other.canonical(s)
    }

    /// Primitive root and exponent of a closed word.
    pub fn root(&self) -> (CurveWord, usize) {
        if !self.closed {
            return (self.clone(), 1);
        }
        let k = self.darts.len();
        for p in 1..=k {
            if k % p == 0 && (0..k).all(|i| self.darts[i] == self.darts[(i + p) % k]) {
                return (CurveWord::closed(self.darts[..p].to_vec()), k / p);
            }
        }
        unreachable!()
    }

    pub fn is_reduced(&self, s: &DissectedSurface) -> bool {
        match s.cells.reduce(&self.walk(s)) {
            Ok(w) => w.ports == self.darts,
            Err(_) => false,
        }
    }
}

/// Reduce an arbitrary word to its minimal representative.
pub fn reduce(s: &DissectedSurface, closed: bool, darts: &[usize]) -> Result<CurveWord, CurveError> {
    if darts.is_empty() {
        return Err(CurveError::Contractible);
    }
    let raw = CurveWord { closed, darts: darts.to_vec() };
    for w in darts.windows(2) {
        if s.dart_loc[w[1]].0 != s.dart_loc[opp(w[0])].0 {
            return Err(CurveError::Invalid("consecutive darts are not in a common polygon".into()));
        }
    }
    let red = s.cells.reduce(&raw.walk(s))?;
    if red.ports.is_empty() {
        return Err(CurveError::Contractible);
    }
    Ok(CurveWord::from_walk(&red))
}

impl GradedCurve {
    pub fn is_arc(&self) -> bool {
        !self.word.closed
    }

    pub fn shift(&self, n: i64) -> GradedCurve {
        GradedCurve { word: self.word.clone(), f: self.f.iter().map(|x| x - n).collect(), band: self.band }
    }

    pub fn reversed(&self) -> GradedCurve {
        let mut f = self.f.clone();
        f.reverse();
        GradedCurve { word: self.word.reversed(), f, band: self.band }
    }

    /// Grading at the crossing nearest endpoint `e`.
    pub fn end_value(&self, e: usize) -> i64 {
        self.f[self.word.end_crossing(e)]
    }

    /// Band parameters after unfolding powers: the primitive word and the total
    /// multiplicity.
    pub fn band_data(&self) -> (CurveWord, Vec<i64>, i64, usize) {
        let (root, r) = self.word.root();
        let b = self.band.unwrap_or(Band { lambda: 1, n: 1 });
        let p = root.darts.len();
        (root, self.f[..p].to_vec(), b.lambda, r * b.n as usize)
    }

    /// Canonical representative: orientation and rotation fixed by the word.
    pub fn canonical(&self, s: &DissectedSurface) -> GradedCurve {
        let target = self.word.canonical(s);
        let k = self.word.darts.len();
        for cand in [self.clone(), self.reversed()] {
            if !self.word.closed {
                if cand.word == target {
                    return cand;
                }
                continue;
            }
            for r in 0..k {
                let mut d = cand.word.darts.clone();
                d.rotate_left(r);
                if d == target.darts {
                    let mut f = cand.f.clone();
                    f.rotate_left(r);
                    return GradedCurve { word: target, f, band: self.band };
                }
            }
        }
        unreachable!("canonical word is a rotation or reversal")
    }

    pub fn winding_number(&self, s: &DissectedSurface) -> i64 {
        self.word.winding_number(s)
    }
}

/// The unique grading with `f(anchor) = value`.
pub fn grade(s: &DissectedSurface, word: &CurveWord, anchor: usize, value: i64) -> Result<GradedCurve, CurveError> {
    let k = word.darts.len();
    if anchor >= k {
        return Err(CurveError::Invalid(format!("anchor index {anchor} out of range")));
    }
    if word.closed {
        let w = word.winding_number(s);
        if w != 0 {
            return Err(CurveError::NotGradable(w));
        }
    }
    let sides = word.sides(s);
    let mut f = vec![0i64; k];
    for i in 1..k {
        f[i] = f[i - 1] + if sides[i - 1] { 1 } else { -1 };
    }
    let off = value - f[anchor];
    for x in &mut f {
        *x += off;
    }
    Ok(GradedCurve { word: word.clone(), f, band: None })
}

pub fn shift(gc: &GradedCurve, n: i64) -> GradedCurve {
    gc.shift(n)
}

pub fn power(gc: &GradedCurve, n: usize) -> Result<GradedCurve, CurveError> {
    if !gc.word.closed || n == 0 {
        return Err(CurveError::Invalid("powers are defined for closed curves and n ≥ 1".into()));
    }
    let mut darts = Vec::new();
    let mut f = Vec::new();
    for _ in 0..n {
        darts.extend_from_slice(&gc.word.darts);
        f.extend_from_slice(&gc.f);
    }
    Ok(GradedCurve { word: CurveWord::closed(darts), f, band: gc.band })
}

/// Concatenate `a` (through its end `ea`) with `b` (from its end `eb`) at their common
/// ∘ point, then reduce.
pub fn smooth(s: &DissectedSurface, a: &CurveWord, ea: usize, b: &CurveWord, eb: usize) -> Result<CurveWord, CurveError> {
    let (qa, _) = a.endpoint(s, ea);
    let (qb, _) = b.endpoint(s, eb);
    if qa != qb {
        return Err(CurveError::Invalid("arcs do not meet at a common ∘ point".into()));
    }
    let a2 = if ea == 1 { a.clone() } else { a.reversed() };
    let b2 = if eb == 0 { b.clone() } else { b.reversed() };
    let mut darts = a2.darts;
    darts.extend(b2.darts);
    reduce(s, false, &darts)
}

/// Join `a` (through its end `ea`) and `b` (from its end `eb`) at their common ∘ point.
/// The part coming from `a` keeps the values `f_a - sa` and the part from `b` keeps
/// `f_b - sb`; fails when these do not form one grading of the reduced result.
pub fn concat_graded(
    s: &DissectedSurface,
    a: &GradedCurve,
    ea: usize,
    sa: i64,
    b: &GradedCurve,
    eb: usize,
    sb: i64,
) -> Result<GradedCurve, CurveError> {
    if a.word.closed || b.word.closed {
        return Err(CurveError::Invalid("only arcs can be joined".into()));
    }
    if a.word.endpoint(s, ea).0 != b.word.endpoint(s, eb).0 {
        return Err(CurveError::Invalid("arcs do not meet at a common ∘ point".into()));
    }
    let a2 = if ea == 1 { a.clone() } else { a.reversed() };
    let b2 = if eb == 0 { b.clone() } else { b.reversed() };
    let mut darts = a2.word.darts.clone();
    darts.extend_from_slice(&b2.word.darts);
    let vals: Vec<i64> = a2.f.iter().map(|x| x - sa).chain(b2.f.iter().map(|x| x - sb)).collect();
    let raw = CurveWord::arc(darts);
    let (red, idx) = s.cells.reduce_tracked(&raw.walk(s))?;
    if red.ports.is_empty() {
        return Err(CurveError::Contractible);
    }
    let word = CurveWord::from_walk(&red);
    let f: Vec<i64> = idx.iter().map(|&i| vals[i]).collect();
    let g = grade(s, &word, 0, f[0])?;
    if g.f != f {
        return Err(CurveError::Invalid("the joined gradings disagree".into()));
    }
    Ok(g)
}

/// The homotopy string or band word of a curve.
pub fn string_of_curve(s: &DissectedSurface, w: &CurveWord) -> StringWord {
    let letters = w
        .inner_steps(s)
        .iter()
        .map(|&(q, a, b)| {
            let (lo, hi) = (a.min(b), a.max(b));
            Letter { path: s.fan_arrows[q][lo..hi].to_vec(), inverse: a > b }
        })
        .collect();
    StringWord { closed: w.closed, start: w.darts[0] / 2, letters }
}

pub fn curve_of_string(s: &DissectedSurface, w: &StringWord) -> Result<CurveWord, CurveError> {
    let alg = &s.algebra;
    w.check(alg)?;
    let end_with = |v: usize, incoming: Option<usize>, outgoing: Option<usize>| -> usize {
        (2 * v..2 * v + 2)
            .find(|&d| {
                let e = &s.ends[d];
                (incoming.is_some() && e.incoming == incoming) || (outgoing.is_some() && e.outgoing == outgoing)
            })
            .expect("arrow is attached to an end of its vertex")
    };
    // entry and exit darts of each letter inside its fan
    let mut entries = Vec::new();
    let mut exits = Vec::new();
    let mut at = w.start;
    for l in &w.letters {
        let (first, last) = (l.path[0], *l.path.last().unwrap());
        let (entry, next) = if l.inverse {
            (end_with(at, Some(last), None), alg.arrows[first].source)
        } else {
            (end_with(at, None, Some(first)), alg.arrows[last].target)
        };
        let exit = if l.inverse { end_with(next, None, Some(first)) } else { end_with(next, Some(last), None) };
        entries.push(entry);
        exits.push(exit);
        at = next;
    }
    let darts: Vec<usize> = if w.closed {
        entries.iter().map(|&e| opp(e)).collect()
    } else if w.letters.is_empty() {
        vec![2 * w.start]
    } else {
        let mut d = vec![opp(entries[0])];
        d.extend(exits.iter().copied());
        d
    };
    let n = entries.len();
    for i in 0..n {
        let next_entry = if w.closed { Some(entries[(i + 1) % n]) } else { entries.get(i + 1).copied() };
        if let Some(ne) = next_entry {
            if opp(exits[i]) != ne {
                return Err(CurveError::Invalid("letters do not pass between adjacent fans".into()));
            }
        }
    }
    let word = CurveWord { closed: w.closed, darts };
    if !word.is_reduced(s) {
        return Err(CurveError::NotReduced);
    }
    Ok(word)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct EndDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub puncture: Option<String>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct AnchorDoc {
    pub index: usize,
    pub value: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct CurveDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub kind: String,
    pub crossings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slots: Option<Vec<usize>>,
    #[serde(default)]
    pub sides: Vec<String>,
    #[serde(default)]
    pub ends: Vec<EndDoc>,
    pub anchor: AnchorDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<Band>,
}

pub fn encode(s: &DissectedSurface, gc: &GradedCurve) -> CurveDoc {
    let w = &gc.word;
    let ends = if w.closed {
        vec![]
    } else {
        (0..2)
            .map(|e| {
                let (q, k) = w.endpoint(s, e);
                EndDoc { point: Some(s.circ_name(q)), slot: Some(k), puncture: None }
            })
            .collect()
    };
    CurveDoc {
        schema: Some(SCHEMA.to_string()),
        kind: if w.closed { "closed" } else { "arc" }.to_string(),
        crossings: w.crossings().iter().map(|&v| s.algebra.vertices[v].clone()).collect(),
        slots: Some(w.darts.iter().map(|&d| s.dart_loc[d].1).collect()),
        sides: w.sides(s).iter().map(|&l| if l { "L" } else { "R" }.to_string()).collect(),
        ends,
        anchor: AnchorDoc { index: 0, value: gc.f[0] },
        band: gc.band,
    }
}

pub fn to_json(s: &DissectedSurface, gc: &GradedCurve) -> String {
    serde_json::to_string_pretty(&encode(s, gc)).expect("curve serializes")
}

pub fn from_json(s: &DissectedSurface, text: &str) -> Result<GradedCurve, CurveError> {
    let doc: CurveDoc = serde_json::from_str(text).map_err(|e| CurveError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    decode(s, &doc)
}

pub fn from_value(s: &DissectedSurface, v: &serde_json::Value) -> Result<GradedCurve, CurveError> {
    let doc: CurveDoc = serde_json::from_value(v.clone()).map_err(|e| CurveError::Parse {
        line: 0,
        column: 0,
        message: e.to_string(),
    })?;
    decode(s, &doc)
}

pub fn decode(s: &DissectedSurface, doc: &CurveDoc) -> Result<GradedCurve, CurveError> {
    if let Some(sc) = &doc.schema {
        if sc != SCHEMA {
            return Err(CurveError::Invalid(format!("unsupported schema `{sc}`")));
        }
    }
    let closed = match doc.kind.as_str() {
        "arc" => false,
        "closed" => true,
        k => return Err(CurveError::Invalid(format!("unknown kind `{k}`"))),
    };
    for e in &doc.ends {
        if let Some(p) = &e.puncture {
            return Err(CurveError::InfiniteArc(p.clone()));
        }
    }
    let k = doc.crossings.len();
    if k == 0 {
        return Err(CurveError::Contractible);
    }
    let verts: Vec<usize> = doc
        .crossings
        .iter()
        .map(|c| s.algebra.vertex_index(c).ok_or_else(|| CurveError::Invalid(format!("unknown dual arc `{c}`"))))
        .collect::<Result<_, _>>()?;
    let n_sides = if closed { k } else { k - 1 };
    if doc.sides.len() != n_sides {
        return Err(CurveError::Invalid(format!("expected {n_sides} sides, found {}", doc.sides.len())));
    }
    let sides: Vec<bool> = doc
        .sides
        .iter()
        .map(|x| match x.as_str() {
            "L" => Ok(true),
            "R" => Ok(false),
            o => Err(CurveError::Invalid(format!("side must be L or R, found `{o}`"))),
        })
        .collect::<Result<_, _>>()?;
    if let Some(sl) = &doc.slots {
        if sl.len() != k {
            return Err(CurveError::Invalid("slots and crossings differ in length".into()));
        }
    }
    let mut ends = Vec::new();
    if !closed {
        if doc.ends.len() != 2 {
            return Err(CurveError::Invalid("an arc needs two ends".into()));
        }
        for e in &doc.ends {
            let q = e
                .point
                .as_deref()
                .and_then(|p| s.circ_index(p))
                .ok_or_else(|| CurveError::Invalid("end without a known ∘ point".into()))?;
            ends.push((q, e.slot));
        }
    } else if !doc.ends.is_empty() {
        return Err(CurveError::Invalid("closed curves have no ends".into()));
    }

    let fits = |i: usize, d: usize| doc.slots.as_ref().is_none_or(|sl| s.dart_loc[d].1 == sl[i]);
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut stack: Vec<Vec<usize>> = vec![vec![]];
    while let Some(prefix) = stack.pop() {
        let i = prefix.len();
        if i == k {
            if closed {
                let (a, b) = (opp(prefix[k - 1]), prefix[0]);
                if s.dart_loc[a].0 != s.dart_loc[b].0 || (s.dart_loc[a].1 < s.dart_loc[b].1) != sides[k - 1] {
                    continue;
                }
            } else {
                let (q, sl) = s.dart_loc[opp(prefix[k - 1])];
                if q != ends[1].0 || ends[1].1.is_some_and(|x| x != sl) {
                    continue;
                }
            }
            found.push(prefix);
            if found.len() > 1 {
                break;
            }
            continue;
        }
        for d in [2 * verts[i], 2 * verts[i] + 1] {
            if !fits(i, d) {
                continue;
            }
            if i == 0 {
                if !closed {
                    let (q, sl) = s.dart_loc[d];
                    if q != ends[0].0 || ends[0].1.is_some_and(|x| x != sl) {
                        continue;
                    }
                }
            } else {
                let a = opp(prefix[i - 1]);
                if s.dart_loc[a].0 != s.dart_loc[d].0 || (s.dart_loc[a].1 < s.dart_loc[d].1) != sides[i - 1] {
                    continue;
                }
            }
            let mut p = prefix.clone();
            p.push(d);
            stack.push(p);
        }
    }
    let darts = match found.len() {
        0 => return Err(CurveError::Invalid("crossings, sides and ends do not describe a curve".into())),
        1 => found.pop().unwrap(),
        n => return Err(CurveError::Ambiguous(n)),
    };
    let word = CurveWord { closed, darts };
    if !word.is_reduced(s) {
        return Err(CurveError::NotReduced);
    }
    let mut gc = grade(s, &word, doc.anchor.index, doc.anchor.value)?;
    if let Some(b) = doc.band {
        if !closed {
            return Err(CurveError::Invalid("band parameters on an arc".into()));
        }
        if b.lambda == 0 || b.n == 0 {
            return Err(CurveError::Invalid("band needs λ ≠ 0 and n ≥ 1".into()));
        }
        gc.band = Some(b);
    }
    Ok(gc)
}
