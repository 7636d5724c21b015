//! Seeded generators for gentle algebras and curves on their surfaces.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraDoc, ArrowDoc, GentleAlgebra};
use crate::curves::{grade, reduce, Band, CurveWord, GradedCurve};
use crate::surface::{opp, DissectedSurface};

pub use rand::SeedableRng;
pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random connected, finite-dimensional gentle algebra on at most `max_vertices`
/// vertices.
pub fn random_algebra(rng: &mut Rng64, max_vertices: usize) -> GentleAlgebra {
    loop {
        if let Some(a) = try_algebra(rng, max_vertices) {
            return a;
        }
    }
}

fn try_algebra(rng: &mut Rng64, max_vertices: usize) -> Option<GentleAlgebra> {
    let n = rng.gen_range(1..=max_vertices.max(1));
    let mut outd = vec![0usize; n];
    let mut ind = vec![0usize; n];
    let mut arrows: Vec<(usize, usize)> = Vec::new();
    let target = rng.gen_range(n.saturating_sub(1)..=n + n / 2 + 1);
    let mut tries = 0;
    while arrows.len() < target && tries < 50 {
        tries += 1;
        let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if outd[s] < 2 && ind[t] < 2 {
            outd[s] += 1;
            ind[t] += 1;
            arrows.push((s, t));
        }
    }
    let mut relations = Vec::new();
    for v in 0..n {
        let ins: Vec<usize> = (0..arrows.len()).filter(|&a| arrows[a].1 == v).collect();
        let mut outs: Vec<usize> = (0..arrows.len()).filter(|&b| arrows[b].0 == v).collect();
        outs.shuffle(rng);
        match (ins.len(), outs.len()) {
            (1, 1) => {
                if rng.gen_bool(0.5) {
                    relations.push((ins[0], outs[0]));
                }
            }
            (1, 2) => relations.push((ins[0], outs[0])),
            (2, 1) => relations.push((ins[rng.gen_range(0..2)], outs[0])),
            (2, 2) => {
                relations.push((ins[0], outs[0]));
                relations.push((ins[1], outs[1]));
            }
            _ => {}
        }
    }
    let name = |v: usize| format!("{}", v + 1);
    let aname = |a: usize| format!("a{}", a + 1);
    let doc = AlgebraDoc {
        schema: None,
        vertices: (0..n).map(name).collect(),
        arrows: arrows
            .iter()
            .enumerate()
            .map(|(i, &(s, t))| ArrowDoc { id: aname(i), source: name(s), target: name(t) })
            .collect(),
        relations: relations.iter().map(|&(a, b)| (aname(a), aname(b))).collect(),
    };
    let alg = GentleAlgebra::validate(&doc).ok()?;
    connected(&alg).then_some(alg)
}

fn connected(alg: &GentleAlgebra) -> bool {
    let n = alg.n_vertices();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for a in &alg.arrows {
            for (x, y) in [(a.source, a.target), (a.target, a.source)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.into_iter().all(|x| x)
}

/// A random walk through the dual dissection: `len` darts, each leaving the polygon the
/// previous one entered through a different slot.
fn random_darts(rng: &mut Rng64, s: &DissectedSurface, len: usize, start: Option<usize>) -> Option<Vec<usize>> {
    let mut d = start.unwrap_or_else(|| rng.gen_range(0..2 * s.algebra.n_vertices()));
    let mut out = vec![d];
    while out.len() < len {
        let (q, slot) = s.dart_loc[opp(d)];
        let choices: Vec<usize> = (0..s.fans[q].len()).filter(|&k| k != slot).collect();
        let &k = choices.choose(rng)?;
        d = s.fans[q][k];
        out.push(d);
    }
    Some(out)
}

/// A random reduced arc with at most `max_len` crossings.
pub fn random_arc(rng: &mut Rng64, s: &DissectedSurface, max_len: usize) -> CurveWord {
    loop {
        let len = rng.gen_range(1..=max_len.max(1));
        let Some(darts) = random_darts(rng, s, len, None) else { continue };
        if let Ok(w) = reduce(s, false, &darts) {
            if w.len() <= max_len {
                return w;
            }
        }
    }
}

/// A random reduced, gradable closed curve with at most `max_len` crossings, or `None`
/// when none turns up (some surfaces carry no gradable closed curves).
pub fn random_closed(rng: &mut Rng64, s: &DissectedSurface, max_len: usize) -> Option<CurveWord> {
    for _ in 0..400 {
        let len = rng.gen_range(1..=max_len.max(1));
        let Some(darts) = random_darts(rng, s, len, None) else { continue };
        let (q_end, slot_end) = s.dart_loc[opp(*darts.last().unwrap())];
        let (q0, slot0) = s.dart_loc[darts[0]];
        if q_end != q0 || slot_end == slot0 {
            continue;
        }
        let Ok(w) = reduce(s, true, &darts) else { continue };
        if w.len() <= max_len && w.winding_number(s) == 0 {
            return Some(w);
        }
    }
    None
}

/// A random graded curve: an arc, or with probability `p_band` a band with parameter
/// `λ ∈ {1, 2, 3}` and multiplicity at most `max_n` (split between a power of the
/// word and the Jordan block size).
pub fn random_graded(rng: &mut Rng64, s: &DissectedSurface, max_len: usize, p_band: f64, max_n: u32) -> GradedCurve {
    if rng.gen_bool(p_band) {
        if let Some(w) = random_closed(rng, s, max_len) {
            let n = rng.gen_range(1..=max_n.max(1));
            let lambda = rng.gen_range(1..=3);
            let mut gc = grade(s, &w, 0, rng.gen_range(-2..=2)).expect("winding number is zero");
            gc.band = Some(Band { lambda, n });
            return gc;
        }
    }
    let w = random_arc(rng, s, max_len);
    grade(s, &w, 0, rng.gen_range(-2..=2)).expect("arcs are gradable")
}

/// A random algebra together with its surface.
pub fn random_surface(rng: &mut Rng64, max_vertices: usize) -> DissectedSurface {
    loop {
        let alg = random_algebra(rng, max_vertices);
        if let Ok(s) = DissectedSurface::from_algebra(&alg) {
            return s;
        }
    }
}
