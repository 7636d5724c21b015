//! Silting reduction at a graded arc `γ`, realised by cutting the surface along `γ`.
//!
//! The cut surface keeps the cell structure of the original one: every polygon is split
//! along `γ` and each side of `γ` collapses to a new ∘ point. Curves that avoid the
//! interior of `γ` are carried over and compared there directly.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::cells::{CellError, CellSurface, Invariants, Mark, Side, Walk};
use crate::curves::{concat_graded, smooth, CurveError, CurveWord, GradedCurve};
use crate::cutting::{self, Mode};
use crate::homs::{hom_table, interior_intersections, records, self_intersections, walk_intersections, Locus};
use crate::oracle::{orbit_hom_in, Complex, Field, PathAlgebra};
use crate::surface::DissectedSurface;

/// Orbit walks give up after this many non-trivial steps in either direction.
pub const ORBIT_LIMIT: usize = 64;

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("γ must be an arc, not a closed curve")]
    NotArc,
    #[error("γ is a loop")]
    Loop,
    #[error("γ crosses itself")]
    SelfCrossing,
    #[error("the curve crosses γ in the interior")]
    Crossing,
    #[error("the curve is not in Z")]
    NotInZ,
    #[error("the curve is γ itself, which vanishes in the reduction")]
    IsGamma,
    #[error("the orbit did not settle within {0} steps")]
    Unsettled(usize),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Cell(#[from] CellError),
}

/// The surface cut along `γ`, with both sides of `γ` contracted.
#[derive(Debug, Clone)]
pub struct CutSurface {
    pub gamma: CurveWord,
    /// ∘ points at the start and end of `γ`.
    pub ends: (usize, usize),
    pub case_tag: u8,
    pub surface: CellSurface,
    /// Contraction of the left side of `γ` and of the right side.
    pub left: Mark,
    pub right: Mark,
    pub pieces: Vec<Invariants>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NewPoint {
    pub name: String,
    pub from: Vec<String>,
    pub side: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointMap {
    #[serde(rename = "newPoints")]
    pub new_points: Vec<NewPoint>,
    pub kept: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PieceDoc {
    pub genus: i64,
    #[serde(rename = "boundaryCount")]
    pub boundary_count: usize,
    pub punctures: usize,
    #[serde(rename = "circPoints")]
    pub circ_points: Vec<String>,
    #[serde(rename = "bulletPoints")]
    pub bullet_points: Vec<String>,
    #[serde(rename = "dissectionSize")]
    pub dissection_size: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolygonDoc {
    pub piece: usize,
    pub corners: Vec<String>,
    /// `"boundary"` or the id of the glued side.
    pub sides: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutDoc {
    pub schema: String,
    #[serde(rename = "caseTag")]
    pub case_tag: u8,
    pub pieces: Vec<PieceDoc>,
    #[serde(rename = "pointMap")]
    pub point_map: PointMap,
    pub polygons: Vec<PolygonDoc>,
}

fn boundary_component(s: &DissectedSurface, q: usize) -> Option<usize> {
    s.boundary.iter().position(|c| c.contains(&Mark::Circ(q)))
}

/// Cut along `γ`. Rejects closed curves, loops and arcs with self-crossings.
pub fn cut(s: &DissectedSurface, gamma: &CurveWord) -> Result<CutSurface, ReductionError> {
    cut_with(s, gamma, &[]).map(|(c, _)| c)
}

fn cut_with(
    s: &DissectedSurface,
    gamma: &CurveWord,
    riders: &[Walk],
) -> Result<(CutSurface, Vec<Option<Walk>>), ReductionError> {
    if gamma.closed {
        return Err(ReductionError::NotArc);
    }
    if gamma.is_loop(s) {
        return Err(ReductionError::Loop);
    }
    if self_intersections(s, gamma) > 0 {
        return Err(ReductionError::SelfCrossing);
    }
    let nc = s.n_circ();
    let (left, right) = (Mark::Circ(nc), Mark::Circ(nc + 1));
    let out = cutting::cut(&s.cells, &[gamma.walk(s)], &[(left, right)], Mode::Contract, riders)?;
    out.surface.check()?;
    let pieces = out.surface.invariants();
    let ends = (gamma.endpoint(s, 0).0, gamma.endpoint(s, 1).0);
    let case_tag = if boundary_component(s, ends.0) != boundary_component(s, ends.1) {
        1
    } else if pieces.len() == 1 {
        2
    } else {
        3
    };
    let c = CutSurface { gamma: gamma.clone(), ends, case_tag, surface: out.surface, left, right, pieces };
    Ok((c, out.riders))
}

impl CutSurface {
    pub fn mark_name(&self, s: &DissectedSurface, m: Mark) -> String {
        let (p, q) = (s.circ_name(self.ends.0), s.circ_name(self.ends.1));
        if m == self.left {
            format!("{p}{q}")
        } else if m == self.right {
            format!("{p}'{q}'")
        } else {
            s.mark_name(m)
        }
    }

    pub fn point_map(&self, s: &DissectedSurface) -> PointMap {
        let from = vec![s.circ_name(self.ends.0), s.circ_name(self.ends.1)];
        let new_points = [(self.left, "left"), (self.right, "right")]
            .into_iter()
            .map(|(m, side)| NewPoint { name: self.mark_name(s, m), from: from.clone(), side: side.into() })
            .collect();
        let kept = (0..s.n_circ()).filter(|&q| q != self.ends.0 && q != self.ends.1).map(|q| s.circ_name(q)).collect();
        PointMap { new_points, kept }
    }

    /// Arcs in an admissible dissection of the cut surface, summed over pieces.
    pub fn dissection_size(&self) -> i64 {
        crate::silting::expected_size(&self.surface)
    }

    pub fn boundary_count(&self) -> usize {
        self.pieces.iter().map(|p| p.boundary_cycles).sum()
    }

    pub fn genus(&self) -> i64 {
        self.pieces.iter().map(|p| p.genus).sum()
    }

    /// The case invariants: boundary count and genus against the original surface, and
    /// one arc fewer in a dissection.
    pub fn verify(&self, s: &DissectedSurface) -> Result<(), String> {
        let (b, g) = (s.boundary_count() as i64, s.genus);
        let (nb, ng, np) = (self.boundary_count() as i64, self.genus(), self.pieces.len());
        let ok = match self.case_tag {
            1 => np == 1 && nb == b - 1 && ng == g,
            2 => np == 1 && nb == b + 1 && ng == g - 1,
            _ => np == 2 && nb == b + 1 && ng == g,
        };
        if !ok {
            return Err(format!("case {}: pieces {np}, b {b} -> {nb}, g {g} -> {ng}", self.case_tag));
        }
        if self.dissection_size() != s.dissection_size() - 1 {
            return Err(format!("dissection size {} -> {}", s.dissection_size(), self.dissection_size()));
        }
        Ok(())
    }

    pub fn dump(&self, s: &DissectedSurface) -> CutDoc {
        let comp = self.surface.component_of_polys();
        let mut circs: Vec<BTreeSet<Mark>> = vec![BTreeSet::new(); self.pieces.len()];
        let mut bullets: Vec<BTreeSet<Mark>> = vec![BTreeSet::new(); self.pieces.len()];
        for (p, poly) in self.surface.polys.iter().enumerate() {
            for &m in &poly.verts {
                match m {
                    Mark::Circ(_) => circs[comp[p]].insert(m),
                    _ => bullets[comp[p]].insert(m),
                };
            }
        }
        let names = |set: &BTreeSet<Mark>| set.iter().map(|&m| self.mark_name(s, m)).collect::<Vec<_>>();
        let pieces = self
            .pieces
            .iter()
            .enumerate()
            .map(|(i, inv)| PieceDoc {
                genus: inv.genus,
                boundary_count: inv.boundary_cycles,
                punctures: inv.punctures,
                circ_points: names(&circs[i]),
                bullet_points: names(&bullets[i]),
                dissection_size: circs[i].len() as i64 + inv.punctures as i64 + inv.boundary_cycles as i64
                    + 2 * inv.genus
                    - 2,
            })
            .collect();
        let polygons = self
            .surface
            .polys
            .iter()
            .enumerate()
            .map(|(p, poly)| PolygonDoc {
                piece: comp[p],
                corners: poly.verts.iter().map(|&m| self.mark_name(s, m)).collect(),
                sides: poly
                    .edges
                    .iter()
                    .map(|e| match e {
                        Side::Port(h) => format!("h{}", self.surface.glue[*h].min(*h)),
                        _ => "boundary".into(),
                    })
                    .collect(),
            })
            .collect();
        CutDoc {
            schema: crate::algebra::SCHEMA.into(),
            case_tag: self.case_tag,
            pieces,
            point_map: self.point_map(s),
            polygons,
        }
    }
}

/// Images of curves on the cut surface, reduced; `None` for curves crossing `γ` in the
/// interior, for `γ` itself and for curves that become trivial.
pub fn project_all(
    s: &DissectedSurface,
    gamma: &CurveWord,
    xs: &[CurveWord],
) -> Result<(CutSurface, Vec<Option<Walk>>), ReductionError> {
    let (c, riders) = cut_with(s, gamma, &xs.iter().map(|x| x.walk(s)).collect::<Vec<_>>())?;
    let mut out = Vec::new();
    for (x, r) in xs.iter().zip(riders) {
        let keep = !x.same_curve(gamma, s) && interior_intersections(s, x, gamma) == 0;
        let img = match r.filter(|_| keep) {
            Some(w) => Some(c.surface.reduce(&w)?).filter(|w| w.closed || !w.ports.is_empty() || w.start != w.end),
            None => None,
        };
        out.push(img);
    }
    Ok((c, out))
}

pub fn project_to_cut(s: &DissectedSurface, gamma: &CurveWord, x: &CurveWord) -> Result<Option<Walk>, ReductionError> {
    Ok(project_all(s, gamma, std::slice::from_ref(x))?.1.pop().flatten())
}

/// The class of `α` under iterated smoothing with `γ` at shared endpoints.
pub fn smoothing_class(s: &DissectedSurface, alpha: &CurveWord, gamma: &CurveWord) -> Result<Vec<CurveWord>, ReductionError> {
    if alpha.closed {
        return Ok(vec![alpha.clone()]);
    }
    if interior_intersections(s, alpha, gamma) > 0 {
        return Err(ReductionError::Crossing);
    }
    let mut class = vec![alpha.clone()];
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::from([alpha.canonical(s).darts]);
    let mut queue = VecDeque::from([alpha.clone()]);
    while let Some(b) = queue.pop_front() {
        for e in 0..2 {
            let q = b.endpoint(s, e).0;
            for eg in (0..2).filter(|&eg| gamma.endpoint(s, eg).0 == q) {
                let Ok(n) = smooth(s, &b, e, gamma, eg) else { continue };
                if n.same_curve(gamma, s) {
                    continue;
                }
                if seen.insert(n.canonical(s).darts) {
                    class.push(n.clone());
                    queue.push_back(n);
                }
            }
        }
    }
    Ok(class)
}

/// Membership in `Z`: no maps `x -> γ[i]` and none `γ[-i] -> x` for `i > 0`.
pub fn in_z(s: &DissectedSurface, x: &GradedCurve, p: &GradedCurve) -> bool {
    let out = hom_table(s, x, p).expect("perfect curves");
    let back = hom_table(s, p, x).expect("perfect curves");
    out.per_degree.range(1..).all(|(_, &n)| n == 0) && back.per_degree.range(1..).all(|(_, &n)| n == 0)
}

/// Ends of degree-zero records `x -> γ` (`forward`) or `γ -> x`, as (end of x, end of γ).
fn zero_records(s: &DissectedSurface, x: &GradedCurve, p: &GradedCurve, forward: bool) -> Result<Vec<(usize, usize)>, ReductionError> {
    let recs = if forward { records(s, x, p) } else { records(s, p, x) };
    let mut out = Vec::new();
    for r in recs.into_iter().filter(|r| r.degree == 0) {
        match r.locus {
            Locus::Boundary { ends: (a, b), .. } => out.push(if forward { (a, b) } else { (b, a) }),
            Locus::Identity => return Err(ReductionError::IsGamma),
            Locus::Interior { .. } => return Err(ReductionError::Crossing),
        }
    }
    Ok(out)
}

fn has_records(s: &DissectedSurface, x: &GradedCurve, p: &GradedCurve, forward: bool) -> bool {
    if forward {
        !records(s, x, p).is_empty()
    } else {
        !records(s, p, x).is_empty()
    }
}

/// `x⟨1⟩`: the cone of the minimal left approximation `x -> P^r`, drawn by joining `x`
/// to `γ` at each degree-zero endpoint.
pub fn step_left(s: &DissectedSurface, x: &GradedCurve, p: &GradedCurve) -> Result<GradedCurve, ReductionError> {
    if x.word.closed {
        return Ok(x.shift(1));
    }
    let recs = zero_records(s, x, p, true)?;
    match recs[..] {
        [] => Ok(x.shift(1)),
        [(ex, eg)] => Ok(concat_graded(s, x, ex, 1, p, eg, 0)?),
        [(ex0, eg0), (_, eg1)] => {
            let z1 = concat_graded(s, x, ex0, 1, p, eg0, 0)?;
            Ok(concat_graded(s, p, eg1, 0, &z1, 0, 0)?)
        }
        _ => Err(ReductionError::NotInZ),
    }
}

/// `x⟨-1⟩`: the cocone of the minimal right approximation `P^r -> x`.
pub fn step_right(s: &DissectedSurface, x: &GradedCurve, p: &GradedCurve) -> Result<GradedCurve, ReductionError> {
    if x.word.closed {
        return Ok(x.shift(-1));
    }
    let recs = zero_records(s, x, p, false)?;
    match recs[..] {
        [] => Ok(x.shift(-1)),
        [(ex, eg)] => Ok(concat_graded(s, p, eg, 0, x, ex, -1)?),
        [(ex0, eg0), (_, eg1)] => {
            let z1 = concat_graded(s, p, eg0, 0, x, ex0, -1)?;
            Ok(concat_graded(s, &z1, 1, 0, p, eg1, 0)?)
        }
        _ => Err(ReductionError::NotInZ),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitEntry {
    /// `k` with this entry equal to `x⟨k⟩`.
    pub step: i64,
    /// Index into the smoothing class.
    pub member: usize,
    /// Shift of this entry relative to the first entry of its run.
    pub offset: i64,
    pub curve: GradedCurve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Pattern {
    /// The orbit is the `[1]`-orbit.
    Shift,
    /// One arc up to some step, another from the next step on.
    TwoRay,
    /// Three arcs; the middle one is `α₂` for `m ≥ 1`, `α₃` for `m ≤ -1`, and occurs `|m|`
    /// times.
    Gap { m: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Run {
    pub member: usize,
    pub first: i64,
    pub last: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitDescriptor {
    pub class: Vec<CurveWord>,
    /// `x⟨k⟩` for every step where the orbit is not a plain shift of its neighbour; the
    /// orbit continues by `[1]` beyond both ends.
    pub table: Vec<OrbitEntry>,
    pub runs: Vec<Run>,
    pub pattern: Pattern,
    /// Class members that never occur in the orbit.
    pub excluded: Vec<usize>,
    /// The grading gap read at the arc that leaves the first run.
    pub predicted: Pattern,
}

impl OrbitDescriptor {
    /// The canonical orbit representative: among the entries with the lexicographically
    /// least word, the one nearest to step 0.
    pub fn representative(&self, s: &DissectedSurface) -> GradedCurve {
        let best = self
            .table
            .iter()
            .min_by_key(|e| (e.curve.word.canonical(s).darts, e.step.abs(), e.step))
            .expect("orbit tables are not empty");
        best.curve.canonical(s)
    }
}

/// The `⟨1⟩`-orbit of `x ∈ Z`, walked both ways until it becomes a plain shift.
pub fn orbit_of(s: &DissectedSurface, x: &GradedCurve, p: &GradedCurve) -> Result<OrbitDescriptor, ReductionError> {
    if x.word.same_curve(&p.word, s) {
        return Err(ReductionError::IsGamma);
    }
    if !x.word.closed && interior_intersections(s, &x.word, &p.word) > 0 {
        return Err(ReductionError::Crossing);
    }
    if !in_z(s, x, p) {
        return Err(ReductionError::NotInZ);
    }
    let mut fwd = vec![x.clone()];
    while has_records(s, fwd.last().unwrap(), p, true) {
        if fwd.len() > ORBIT_LIMIT {
            return Err(ReductionError::Unsettled(ORBIT_LIMIT));
        }
        fwd.push(step_left(s, fwd.last().unwrap(), p)?);
    }
    let mut bwd = vec![];
    let mut cur = x.clone();
    while has_records(s, &cur, p, false) {
        if bwd.len() > ORBIT_LIMIT {
            return Err(ReductionError::Unsettled(ORBIT_LIMIT));
        }
        cur = step_right(s, &cur, p)?;
        bwd.push(cur.clone());
    }
    let k0 = -(bwd.len() as i64);
    let curves: Vec<GradedCurve> = bwd.into_iter().rev().chain(fwd).collect();

    let class = smoothing_class(s, &x.word, &p.word)?;
    let member_of = |w: &CurveWord| class.iter().position(|c| c.same_curve(w, s));
    let mut table = Vec::new();
    let mut runs: Vec<Run> = Vec::new();
    let mut run_base: Option<GradedCurve> = None;
    for (i, c) in curves.iter().enumerate() {
        let step = k0 + i as i64;
        let member = member_of(&c.word).ok_or(ReductionError::NotInZ)?;
        match runs.last_mut() {
            Some(r) if r.member == member => r.last = step,
            _ => {
                runs.push(Run { member, first: step, last: step });
                run_base = Some(c.clone());
            }
        }
        let base = run_base.as_ref().unwrap();
        let offset = base.canonical(s).f[0] - c.canonical(s).f[0];
        table.push(OrbitEntry { step, member, offset, curve: c.clone() });
    }
    let pattern = match runs.len() {
        1 => Pattern::Shift,
        2 => Pattern::TwoRay,
        _ => {
            let len = runs[1].last - runs[1].first + 1;
            let sign = if middle_is_left(s, p, &curves, &runs)? { 1 } else { -1 };
            Pattern::Gap { m: sign * len }
        }
    };
    let predicted = predict(s, p, &curves, &runs, class.len())?;
    let seen: BTreeSet<usize> = runs.iter().map(|r| r.member).collect();
    let excluded = (0..class.len()).filter(|i| !seen.contains(i)).collect();
    Ok(OrbitDescriptor { class, table, runs, pattern, excluded, predicted })
}

/// The last curve of the first run and the ends of its degree-zero record to `γ`.
fn exit_of<'a>(
    s: &DissectedSurface,
    p: &GradedCurve,
    curves: &'a [GradedCurve],
    runs: &[Run],
) -> Result<(&'a GradedCurve, usize, usize), ReductionError> {
    let first = runs[0].first;
    let xt = &curves[(runs[0].last - first) as usize];
    let recs = zero_records(s, xt, p, true)?;
    let &(ex, eg) = recs.first().ok_or(ReductionError::NotInZ)?;
    Ok((xt, ex, eg))
}

/// Whether the first run leaves through the left side of `γ`.
fn middle_is_left(s: &DissectedSurface, p: &GradedCurve, curves: &[GradedCurve], runs: &[Run]) -> Result<bool, ReductionError> {
    let (xt, ex, _) = exit_of(s, p, curves, runs)?;
    let (c, riders) = cut_with(s, &p.word, &[xt.word.walk(s)])?;
    let w = riders[0].as_ref().ok_or(ReductionError::Crossing)?;
    let (poly, v) = if ex == 0 { w.start } else { w.end };
    Ok(c.surface.polys[poly].verts[v] == c.left)
}

/// The pattern the grading predicts: class size 1 gives a shift orbit, size 2 two rays,
/// size 4 two rays when the gap `D` at the far shared end is 0 and a middle run of
/// length `D` otherwise.
fn predict(
    s: &DissectedSurface,
    p: &GradedCurve,
    curves: &[GradedCurve],
    runs: &[Run],
    class_size: usize,
) -> Result<Pattern, ReductionError> {
    match class_size {
        1 => return Ok(Pattern::Shift),
        2 => return Ok(Pattern::TwoRay),
        _ => {}
    }
    if runs.len() < 2 {
        return Err(ReductionError::NotInZ);
    }
    let (xt, ex, _) = exit_of(s, p, curves, runs)?;
    // the map to γ at the far shared end has degree -D
    let d = records(s, xt, p)
        .into_iter()
        .find_map(|r| match r.locus {
            Locus::Boundary { ends: (e, _), .. } if e != ex => Some(-r.degree),
            _ => None,
        })
        .ok_or(ReductionError::NotInZ)?;
    if d == 0 {
        return Ok(Pattern::TwoRay);
    }
    let sign = if middle_is_left(s, p, curves, runs)? { 1 } else { -1 };
    Ok(Pattern::Gap { m: sign * d })
}

/// Hom in the orbit category, counted on the cut surface.
pub fn orbit_hom(s: &DissectedSurface, x: &GradedCurve, y: &GradedCurve, p: &GradedCurve) -> Result<usize, ReductionError> {
    for c in [x, y] {
        if c.word.same_curve(&p.word, s) {
            return Ok(0);
        }
        if !in_z(s, c, p) {
            return Err(ReductionError::NotInZ);
        }
    }
    let (c, imgs) = project_all(s, &p.word, &[x.word.clone(), y.word.clone()])?;
    let mult = |g: &GradedCurve| g.band.map_or(1, |b| b.n as usize);
    match (&imgs[0], &imgs[1]) {
        (Some(a), Some(b)) => Ok(walk_intersections(&c.surface, a, mult(x), b, mult(y))?),
        _ => Ok(0),
    }
}

/// Hom in the orbit category from complexes: the sum over `k` of `Hom(x, y⟨k⟩)` modulo
/// maps through `add P`, with `y⟨k⟩` built from cones of approximations.
pub fn orbit_hom_oracle<F: Field>(
    pa: &PathAlgebra,
    s: &DissectedSurface,
    x: &GradedCurve,
    y: &GradedCurve,
    p: &GradedCurve,
) -> Result<usize, ReductionError> {
    let cx: Complex<F> = pa.complex_of(s, x);
    let cy: Complex<F> = pa.complex_of(s, y);
    let cp: Complex<F> = pa.complex_of(s, p);
    orbit_hom_in(pa, &cx, &cy, &cp, ORBIT_LIMIT).ok_or(ReductionError::Unsettled(ORBIT_LIMIT))
}
