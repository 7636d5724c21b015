//! Homological oracle. Complexes of indecomposable projectives are built from homotopy
//! strings and bands, and morphism spaces are computed as cohomology of Hom complexes by
//! exact linear algebra. Nothing here looks at the surface beyond reading the string of
//! a curve, so the oracle can check the geometric answers independently.
//!
//! A morphism `P_x -> P_y` is a linear combination of nonzero paths from `x` to `y`, and
//! composing `P_x -> P_y -> P_z` concatenates the paths in that order.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{GentleAlgebra, PathBasis, StringWord};
use crate::curves::{string_of_curve, GradedCurve};
use crate::surface::DissectedSurface;

pub const DEFAULT_PRIME: u64 = 32003;

pub trait Field: Clone + Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(x: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Self;
    fn is_zero(&self) -> bool;
}

pub type Q = BigRational;

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(x: i64) -> Self {
        BigRational::from_integer(BigInt::from(x))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

static MODULUS: AtomicU64 = AtomicU64::new(DEFAULT_PRIME);

/// Residues modulo the process-wide prime set by [`set_modulus`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp(u64);

pub fn set_modulus(p: u64) {
    MODULUS.store(p, Ordering::Relaxed);
}

pub fn modulus() -> u64 {
    MODULUS.load(Ordering::Relaxed)
}

impl Fp {
    pub fn value(self) -> u64 {
        self.0
    }
}

impl Field for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1)
    }
    fn from_i64(x: i64) -> Self {
        Fp(x.rem_euclid(modulus() as i64) as u64)
    }
    fn add(&self, o: &Self) -> Self {
        Fp((self.0 + o.0) % modulus())
    }
    fn sub(&self, o: &Self) -> Self {
        let p = modulus();
        Fp((self.0 + p - o.0) % p)
    }
    fn mul(&self, o: &Self) -> Self {
        Fp(((self.0 as u128 * o.0 as u128) % modulus() as u128) as u64)
    }
    fn neg(&self) -> Self {
        let p = modulus();
        Fp((p - self.0) % p)
    }
    fn inv(&self) -> Self {
        assert!(self.0 != 0, "inverse of zero");
        let p = modulus();
        let (mut base, mut exp, mut acc) = (self.0 as u128, p - 2, 1u128);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p as u128;
            }
            base = base * base % p as u128;
            exp >>= 1;
        }
        Fp(acc as u64)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldChoice {
    Rational,
    Prime(u64),
}

impl FieldChoice {
    /// Parse `Q`, `Fp` or `Fp:<p>`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let t = text.trim();
        if t == "Q" {
            return Ok(FieldChoice::Rational);
        }
        if t == "Fp" {
            return Ok(FieldChoice::Prime(DEFAULT_PRIME));
        }
        if let Some(p) = t.strip_prefix("Fp:") {
            let p: u64 = p.parse().map_err(|_| format!("bad prime `{p}`"))?;
            if p < 2 || p > u32::MAX as u64 || (2..).take_while(|d| d * d <= p).any(|d| p % d == 0) {
                return Err(format!("`{p}` is not a prime below 2^32"));
            }
            return Ok(FieldChoice::Prime(p));
        }
        Err(format!("unknown field `{t}`, expected Q or Fp:<p>"))
    }

    /// Read `SILTSURF_FIELD`, defaulting to the rationals.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var("SILTSURF_FIELD") {
            Ok(v) if !v.trim().is_empty() => Self::parse(&v),
            _ => Ok(FieldChoice::Rational),
        }
    }

    pub fn name(&self) -> String {
        match self {
            FieldChoice::Rational => "Q".into(),
            FieldChoice::Prime(p) => format!("Fp:{p}"),
        }
    }
}

/// A linear combination of paths, sorted by path id with nonzero coefficients.
pub type Elt<F> = Vec<(u32, F)>;

fn elt_add<F: Field>(a: &Elt<F>, b: &Elt<F>, scale: &F) -> Elt<F> {
    let mut m: BTreeMap<u32, F> = a.iter().cloned().collect();
    for (p, c) in b {
        let e = m.entry(*p).or_insert_with(F::zero);
        *e = e.add(&c.mul(scale));
    }
    m.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// The path category of a gentle algebra with a precomputed composition table.
#[derive(Debug, Clone)]
pub struct PathAlgebra {
    pub algebra: GentleAlgebra,
    pub basis: PathBasis,
    comp: Vec<Vec<Option<u32>>>,
    between: HashMap<(usize, usize), Vec<u32>>,
}

impl PathAlgebra {
    pub fn new(alg: &GentleAlgebra) -> Self {
        let basis = alg.paths();
        let n = basis.len();
        let comp = (0..n)
            .map(|p| (0..n).map(|q| basis.compose(alg, p, q).map(|r| r as u32)).collect())
            .collect();
        let mut between: HashMap<(usize, usize), Vec<u32>> = HashMap::new();
        for (i, p) in basis.paths.iter().enumerate() {
            between.entry((p.source, p.target)).or_default().push(i as u32);
        }
        PathAlgebra { algebra: alg.clone(), basis, comp, between }
    }

    pub fn paths_between(&self, x: usize, y: usize) -> &[u32] {
        self.between.get(&(x, y)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Path `p` followed by path `q`.
    pub fn comp(&self, p: u32, q: u32) -> Option<u32> {
        self.comp[p as usize][q as usize]
    }

    pub fn path(&self, source: usize, arrows: &[usize]) -> u32 {
        self.basis.find(source, arrows).expect("path is nonzero") as u32
    }

    pub fn is_trivial(&self, p: u32) -> bool {
        self.basis.paths[p as usize].is_trivial()
    }

    /// `first` followed by `second`.
    pub fn compose<F: Field>(&self, first: &Elt<F>, second: &Elt<F>) -> Elt<F> {
        let mut m: BTreeMap<u32, F> = BTreeMap::new();
        for (p, a) in first {
            for (q, b) in second {
                if let Some(r) = self.comp(*p, *q) {
                    let e = m.entry(r).or_insert_with(F::zero);
                    *e = e.add(&a.mul(b));
                }
            }
        }
        m.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    /// Inverse of an endomorphism of `P_v` with invertible constant term.
    fn invert_elt<F: Field>(&self, e: &Elt<F>) -> Option<Elt<F>> {
        let c = e.iter().find(|(p, _)| self.is_trivial(*p))?;
        let (unit, cinv) = (c.0, c.1.inv());
        let scaled: Elt<F> = e.iter().map(|(p, x)| (*p, x.mul(&cinv))).collect();
        // scaled = 1 + u with u nilpotent, so the inverse is a finite geometric series
        let u: Elt<F> = scaled.iter().filter(|(p, _)| *p != unit).cloned().collect();
        let neg_u: Elt<F> = u.iter().map(|(p, x)| (*p, x.neg())).collect();
        let mut acc: Elt<F> = vec![(unit, F::one())];
        let mut term: Elt<F> = vec![(unit, F::one())];
        loop {
            term = self.compose(&term, &neg_u);
            if term.is_empty() {
                break;
            }
            acc = elt_add(&acc, &term, &F::one());
        }
        Some(acc.into_iter().map(|(p, x)| (p, x.mul(&cinv))).collect())
    }
}

/// Matrix of path combinations: `(row, col)` maps summand `col` of the source to summand
/// `row` of the target.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<F> {
    pub entries: BTreeMap<(usize, usize), Elt<F>>,
}

impl<F: Field> Mat<F> {
    pub fn zero() -> Self {
        Mat { entries: BTreeMap::new() }
    }

    pub fn add_entry(&mut self, row: usize, col: usize, e: &Elt<F>, scale: &F) {
        let cur = self.entries.remove(&(row, col)).unwrap_or_default();
        let new = elt_add(&cur, e, scale);
        if !new.is_empty() {
            self.entries.insert((row, col), new);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A bounded complex of indecomposable projectives. `terms[i]` lists the vertices of the
/// summands in degree `i`, and `d[i]` maps degree `i` to degree `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Complex<F> {
    pub terms: BTreeMap<i64, Vec<usize>>,
    pub d: BTreeMap<i64, Mat<F>>,
}

impl<F: Field> Complex<F> {
    pub fn zero() -> Self {
        Complex { terms: BTreeMap::new(), d: BTreeMap::new() }
    }

    pub fn term(&self, i: i64) -> &[usize] {
        self.terms.get(&i).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|t| t.is_empty())
    }

    pub fn rank(&self) -> usize {
        self.terms.values().map(|t| t.len()).sum()
    }

    fn diff(&self, i: i64) -> Option<&Mat<F>> {
        self.d.get(&i)
    }

    fn add_summand(&mut self, deg: i64, v: usize) -> usize {
        let t = self.terms.entry(deg).or_default();
        t.push(v);
        t.len() - 1
    }

    fn add_diff(&mut self, deg: i64, row: usize, col: usize, e: &Elt<F>, scale: &F) {
        self.d.entry(deg).or_insert_with(Mat::zero).add_entry(row, col, e, scale);
    }

    /// `C[n]`, with degree `i` of the result equal to degree `i + n` of `C` and the
    /// differential multiplied by `(-1)^n`.
    pub fn shift(&self, n: i64) -> Self {
        let sign = if n.rem_euclid(2) == 0 { F::one() } else { F::one().neg() };
        Complex {
            terms: self.terms.iter().map(|(&i, t)| (i - n, t.clone())).collect(),
            d: self
                .d
                .iter()
                .map(|(&i, m)| {
                    let mut out = Mat::zero();
                    for (&(r, c), e) in &m.entries {
                        out.add_entry(r, c, e, &sign);
                    }
                    (i - n, out)
                })
                .collect(),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&i, t) in &other.terms {
            let base = out.term(i).len();
            out.terms.entry(i).or_default().extend(t.iter().copied());
            if let Some(m) = other.d.get(&i) {
                let base_next = self.term(i + 1).len();
                for (&(r, c), e) in &m.entries {
                    out.add_diff(i, base_next + r, base + c, e, &F::one());
                }
            }
        }
        out
    }

    /// Check `d ∘ d = 0` and that every entry joins the right vertices.
    pub fn check(&self, pa: &PathAlgebra) -> Result<(), String> {
        for (&i, m) in &self.d {
            for (&(r, c), e) in &m.entries {
                let (x, y) = (self.term(i).get(c), self.term(i + 1).get(r));
                let (Some(&x), Some(&y)) = (x, y) else {
                    return Err(format!("entry ({r},{c}) of d^{i} out of range"));
                };
                for (p, _) in e {
                    let path = &pa.basis.paths[*p as usize];
                    if path.source != x || path.target != y {
                        return Err(format!("entry ({r},{c}) of d^{i} has a path with wrong ends"));
                    }
                }
            }
            if let Some(m2) = self.d.get(&(i + 1)) {
                let mut full: Mat<F> = Mat::zero();
                for (&(r1, c1), e1) in &m.entries {
                    for (&(r2, c2), e2) in &m2.entries {
                        if c2 == r1 {
                            full.add_entry(r2, c1, &pa.compose(e1, e2), &F::one());
                        }
                    }
                }
                if !full.is_zero() {
                    return Err(format!("d^{} ∘ d^{i} is nonzero", i + 1));
                }
            }
        }
        Ok(())
    }

    /// Summands in canonical order: per degree, the sorted vertex list.
    pub fn signature(&self) -> BTreeMap<i64, Vec<usize>> {
        self.terms
            .iter()
            .filter(|(_, t)| !t.is_empty())
            .map(|(&i, t)| {
                let mut t = t.clone();
                t.sort();
                (i, t)
            })
            .collect()
    }
}

impl PathAlgebra {
    /// The complex `P_w` of a homotopy string with the given degree of its first summand
    /// and, for bands, the Jordan block data.
    pub fn string_complex<F: Field>(
        &self,
        w: &StringWord,
        degrees: &[i64],
        band: Option<(i64, usize)>,
    ) -> Complex<F> {
        let alg = &self.algebra;
        let verts = w.vertices(alg);
        let k = if w.closed { w.letters.len() } else { w.letters.len() + 1 };
        assert_eq!(degrees.len(), k);
        let (lambda, copies) = band.unwrap_or((1, 1));
        let copies = if w.closed { copies } else { 1 };
        let mut c = Complex::zero();
        let mut idx = vec![vec![0usize; copies]; k];
        for i in 0..k {
            for r in 0..copies {
                idx[i][r] = c.add_summand(degrees[i], verts[i]);
            }
        }
        for (i, letter) in w.letters.iter().enumerate() {
            let j = (i + 1) % k;
            let wrap = w.closed && j == 0;
            let (from, to) = if letter.inverse { (j, i) } else { (i, j) };
            let deg = degrees[from];
            debug_assert_eq!(degrees[to], deg + 1);
            let p = self.path(verts[from], &letter.path);
            for r in 0..copies {
                if wrap {
                    c.add_diff(deg, idx[to][r], idx[from][r], &vec![(p, F::from_i64(lambda))], &F::one());
                    if r + 1 < copies {
                        c.add_diff(deg, idx[to][r + 1], idx[from][r], &vec![(p, F::one())], &F::one());
                    }
                } else {
                    c.add_diff(deg, idx[to][r], idx[from][r], &vec![(p, F::one())], &F::one());
                }
            }
        }
        c
    }

    /// The complex of a graded curve, read through its homotopy string.
    pub fn complex_of<F: Field>(&self, s: &DissectedSurface, gc: &GradedCurve) -> Complex<F> {
        if gc.word.closed {
            let (root, f, lambda, n) = gc.band_data();
            let w = string_of_curve(s, &root);
            self.string_complex(&w, &f, Some((lambda, n)))
        } else {
            let w = string_of_curve(s, &gc.word);
            self.string_complex(&w, &gc.f, None)
        }
    }
}

/// Sparse vectors and an echelon basis with leading-column pivots.
pub type SVec<F> = BTreeMap<usize, F>;

fn sv_axpy<F: Field>(v: &mut SVec<F>, a: &F, w: &SVec<F>) {
    for (k, x) in w {
        let e = v.entry(*k).or_insert_with(F::zero);
        *e = e.add(&a.mul(x));
        if e.is_zero() {
            v.remove(k);
        }
    }
}

#[derive(Debug, Clone)]
pub struct Echelon<F> {
    rows: BTreeMap<usize, (SVec<F>, SVec<F>)>,
}

impl<F: Field> Default for Echelon<F> {
    fn default() -> Self {
        Echelon { rows: BTreeMap::new() }
    }
}

impl<F: Field> Echelon<F> {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the basis, carrying a combination vector along. Returns the
    /// residue and the combination.
    fn reduce(&self, mut v: SVec<F>, mut combo: SVec<F>) -> (SVec<F>, SVec<F>) {
        let mut floor = 0;
        loop {
            let Some((&lead, x)) = v.range(floor..).next() else { break };
            match self.rows.get(&lead) {
                Some((row, rc)) => {
                    let a = x.neg();
                    sv_axpy(&mut v, &a, row);
                    sv_axpy(&mut combo, &a, rc);
                }
                None => floor = lead + 1,
            }
        }
        (v, combo)
    }

    /// Insert a vector; returns `true` if it was independent of the basis.
    pub fn insert(&mut self, v: SVec<F>) -> bool {
        self.insert_tracked(v, SVec::new()).is_none()
    }

    /// Insert `v` tagged with `combo`; when `v` is dependent, returns the combination
    /// that reduces it to zero.
    fn insert_tracked(&mut self, v: SVec<F>, combo: SVec<F>) -> Option<SVec<F>> {
        let (v, combo) = self.reduce(v, combo);
        let Some((&lead, x)) = v.iter().next() else { return Some(combo) };
        let inv = x.inv();
        let norm = |m: SVec<F>| m.into_iter().map(|(k, y)| (k, y.mul(&inv))).collect::<SVec<F>>();
        self.rows.insert(lead, (norm(v), norm(combo)));
        None
    }

    pub fn contains(&self, v: &SVec<F>) -> bool {
        self.reduce(v.clone(), SVec::new()).0.is_empty()
    }
}

/// Rank and kernel basis of a linear map given by the images of the basis vectors.
pub fn rank_and_kernel<F: Field>(images: &[SVec<F>]) -> (usize, Vec<SVec<F>>) {
    let mut ech = Echelon::default();
    let mut kernel = Vec::new();
    for (j, img) in images.iter().enumerate() {
        let mut e = SVec::new();
        e.insert(j, F::one());
        if let Some(k) = ech.insert_tracked(img.clone(), e) {
            kernel.push(k);
        }
    }
    (ech.rank(), kernel)
}

/// Basis of the degree `n` part of `Hom(C, D)`: maps from a summand of `C^i` to a summand
/// of `D^{i+n}` along one path.
#[derive(Debug, Clone)]
pub struct HomSpace {
    pub n: i64,
    pub basis: Vec<(i64, usize, usize, u32)>,
    index: HashMap<(i64, usize, usize, u32), usize>,
}

impl HomSpace {
    pub fn new<F: Field>(pa: &PathAlgebra, c: &Complex<F>, d: &Complex<F>, n: i64) -> Self {
        let mut basis = Vec::new();
        for (&i, src) in &c.terms {
            let tgt = d.term(i + n);
            for (s, &x) in src.iter().enumerate() {
                for (t, &y) in tgt.iter().enumerate() {
                    for &p in pa.paths_between(x, y) {
                        basis.push((i, s, t, p));
                    }
                }
            }
        }
        let index = basis.iter().enumerate().map(|(k, &b)| (b, k)).collect();
        HomSpace { n, basis, index }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn find(&self, key: (i64, usize, usize, u32)) -> Option<usize> {
        self.index.get(&key).copied()
    }
}

/// The Hom complex `Hom(C, D)` with `δφ = d_D φ - (-1)^n φ d_C`.
pub struct HomComplex<'a, F> {
    pa: &'a PathAlgebra,
    pub c: &'a Complex<F>,
    pub d: &'a Complex<F>,
    spaces: BTreeMap<i64, HomSpace>,
}

impl<'a, F: Field> HomComplex<'a, F> {
    pub fn new(pa: &'a PathAlgebra, c: &'a Complex<F>, d: &'a Complex<F>) -> Self {
        HomComplex { pa, c, d, spaces: BTreeMap::new() }
    }

    /// Degrees in which `Hom^n(C, D)` can be nonzero.
    pub fn degree_range(&self) -> Option<(i64, i64)> {
        let cd: Vec<i64> = self.c.terms.iter().filter(|(_, t)| !t.is_empty()).map(|(&i, _)| i).collect();
        let dd: Vec<i64> = self.d.terms.iter().filter(|(_, t)| !t.is_empty()).map(|(&i, _)| i).collect();
        if cd.is_empty() || dd.is_empty() {
            return None;
        }
        Some((dd[0] - cd[cd.len() - 1], dd[dd.len() - 1] - cd[0]))
    }

    pub fn space(&mut self, n: i64) -> &HomSpace {
        let (pa, c, d) = (self.pa, self.c, self.d);
        self.spaces.entry(n).or_insert_with(|| HomSpace::new(pa, c, d, n))
    }

    /// `δ` applied to a vector of `Hom^n`.
    pub fn delta(&mut self, n: i64, v: &SVec<F>) -> SVec<F> {
        self.space(n);
        self.space(n + 1);
        let (src, tgt) = (&self.spaces[&n], &self.spaces[&(n + 1)]);
        let sign = if n.rem_euclid(2) == 0 { F::one().neg() } else { F::one() };
        let mut out = SVec::new();
        let mut add = |key: (i64, usize, usize, u32), x: F| {
            let k = tgt.find(key).expect("hom basis is closed under δ");
            let e = out.entry(k).or_insert_with(F::zero);
            *e = e.add(&x);
            if e.is_zero() {
                out.remove(&k);
            }
        };
        for (&b, coeff) in v {
            let (i, s, t, p) = src.basis[b];
            if let Some(m) = self.d.diff(i + n) {
                for (&(r, col), e) in m.entries.iter() {
                    if col != t {
                        continue;
                    }
                    for (q, x) in e {
                        if let Some(pq) = self.pa.comp(p, *q) {
                            add((i, s, r, pq), coeff.mul(x));
                        }
                    }
                }
            }
            if let Some(m) = self.c.diff(i - 1) {
                for (&(r, col), e) in &m.entries {
                    if r != s {
                        continue;
                    }
                    for (q, x) in e {
                        if let Some(qp) = self.pa.comp(*q, p) {
                            add((i - 1, col, t, qp), sign.mul(&coeff.mul(x)));
                        }
                    }
                }
            }
        }
        out
    }

    fn delta_images(&mut self, n: i64) -> Vec<SVec<F>> {
        let dim = self.space(n).dim();
        (0..dim)
            .map(|b| {
                let mut e = SVec::new();
                e.insert(b, F::one());
                self.delta(n, &e)
            })
            .collect()
    }

    /// `dim H^n(Hom(C, D)) = dim Hom_K(C, D[n])`.
    pub fn cohomology_dim(&mut self, n: i64) -> usize {
        let dim = self.space(n).dim();
        if dim == 0 {
            return 0;
        }
        let (r_out, _) = rank_and_kernel(&self.delta_images(n));
        let (r_in, _) = rank_and_kernel(&self.delta_images(n - 1));
        dim - r_out - r_in
    }

    /// Nonzero cohomology dimensions over all degrees.
    pub fn all_dims(&mut self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        if let Some((lo, hi)) = self.degree_range() {
            for n in lo..=hi {
                let k = self.cohomology_dim(n);
                if k > 0 {
                    out.insert(n, k);
                }
            }
        }
        out
    }

    /// Boundaries `B^n` as an echelon basis.
    pub fn boundaries(&mut self, n: i64) -> Echelon<F> {
        let mut ech = Echelon::default();
        for img in self.delta_images(n - 1) {
            ech.insert(img);
        }
        ech
    }

    /// Cocycles representing a basis of `H^n`.
    pub fn cohomology_basis(&mut self, n: i64) -> Vec<SVec<F>> {
        let (_, kernel) = rank_and_kernel(&self.delta_images(n));
        let mut ech = self.boundaries(n);
        kernel.into_iter().filter(|z| ech.insert(z.clone())).collect()
    }

    pub fn is_cocycle(&mut self, n: i64, v: &SVec<F>) -> bool {
        self.delta(n, v).is_empty()
    }

    pub fn is_boundary(&mut self, n: i64, v: &SVec<F>) -> bool {
        self.boundaries(n).contains(v)
    }

    /// A random cocycle of degree `n`.
    pub fn random_cocycle(&mut self, n: i64, rng: &mut ChaCha8Rng) -> SVec<F> {
        let (_, kernel) = rank_and_kernel(&self.delta_images(n));
        let mut v = SVec::new();
        for z in &kernel {
            let a = F::from_i64(rng.gen_range(-40..=40));
            sv_axpy(&mut v, &a, z);
        }
        v
    }
}

/// A map of complexes given by its components, as a vector of `Hom^n(C, D)`.
pub fn map_to_matrices<F: Field>(space: &HomSpace, v: &SVec<F>) -> BTreeMap<i64, Mat<F>> {
    let mut out: BTreeMap<i64, Mat<F>> = BTreeMap::new();
    for (&b, x) in v {
        let (i, s, t, p) = space.basis[b];
        out.entry(i).or_insert_with(Mat::zero).add_entry(t, s, &vec![(p, F::one())], x);
    }
    out
}

pub fn matrices_to_map<F: Field>(space: &HomSpace, m: &BTreeMap<i64, Mat<F>>) -> SVec<F> {
    let mut v = SVec::new();
    for (&i, mat) in m {
        for (&(t, s), e) in &mat.entries {
            for (p, x) in e {
                let k = space.find((i, s, t, *p)).expect("component lies in the hom space");
                sv_axpy(&mut v, x, &BTreeMap::from([(k, F::one())]));
            }
        }
    }
    v
}

/// `ψ ∘ φ` for `φ ∈ Hom^m(C, D)` and `ψ ∈ Hom^n(D, E)`, as matrices by source degree.
pub fn compose_maps<F: Field>(
    pa: &PathAlgebra,
    phi: &BTreeMap<i64, Mat<F>>,
    m: i64,
    psi: &BTreeMap<i64, Mat<F>>,
) -> BTreeMap<i64, Mat<F>> {
    let mut out: BTreeMap<i64, Mat<F>> = BTreeMap::new();
    for (&i, a) in phi {
        let Some(b) = psi.get(&(i + m)) else { continue };
        let mut prod = Mat::zero();
        for (&(t, s), e1) in &a.entries {
            for (&(u, t2), e2) in &b.entries {
                if t2 == t {
                    prod.add_entry(u, s, &pa.compose(e1, e2), &F::one());
                }
            }
        }
        if !prod.is_zero() {
            out.insert(i, prod);
        }
    }
    out
}

/// Cone of a degree-zero chain map `φ: C -> D`: degree `i` is `C^{i+1} ⊕ D^i`.
pub fn cone<F: Field>(c: &Complex<F>, d: &Complex<F>, phi: &BTreeMap<i64, Mat<F>>) -> Complex<F> {
    let mut out = Complex::zero();
    let degs: Vec<i64> = c.terms.keys().map(|i| i - 1).chain(d.terms.keys().copied()).collect();
    let (lo, hi) = match (degs.iter().min(), degs.iter().max()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return out,
    };
    for i in lo..=hi {
        for &v in c.term(i + 1) {
            out.add_summand(i, v);
        }
        for &v in d.term(i) {
            out.add_summand(i, v);
        }
    }
    let minus = F::one().neg();
    for i in lo..=hi {
        let (cs, cs_next) = (c.term(i + 1).len(), c.term(i + 2).len());
        if let Some(m) = c.diff(i + 1) {
            for (&(r, col), e) in &m.entries {
                out.add_diff(i, r, col, e, &minus);
            }
        }
        if let Some(m) = phi.get(&(i + 1)) {
            for (&(r, col), e) in &m.entries {
                out.add_diff(i, cs_next + r, col, e, &F::one());
            }
        }
        if let Some(m) = d.diff(i) {
            for (&(r, col), e) in &m.entries {
                out.add_diff(i, cs_next + r, cs + col, e, &F::one());
            }
        }
    }
    out.terms.retain(|_, t| !t.is_empty());
    out
}

impl PathAlgebra {
    /// Split off contractible pieces `P --iso--> P` until every differential lies in the
    /// radical. The result is homotopy equivalent to the input.
    pub fn minimize<F: Field>(&self, c: &Complex<F>) -> Complex<F> {
        let mut c = c.clone();
        loop {
            let pivot = c.d.iter().find_map(|(&i, m)| {
                m.entries
                    .iter()
                    .find(|(_, e)| e.iter().any(|(p, _)| self.is_trivial(*p)))
                    .map(|(&(r, col), e)| (i, r, col, e.clone()))
            });
            let Some((i, b2, b, phi)) = pivot else { break };
            let phi_inv = self.invert_elt(&phi).expect("pivot has a unit");
            let m = c.d[&i].clone();
            let mut new_m: Mat<F> = Mat::zero();
            let col_of_b: Vec<(usize, &Elt<F>)> =
                m.entries.iter().filter(|(&(r, col), _)| col == b && r != b2).map(|(&(r, _), e)| (r, e)).collect();
            let row_of_b2: Vec<(usize, &Elt<F>)> =
                m.entries.iter().filter(|(&(r, col), _)| r == b2 && col != b).map(|(&(_, col), e)| (col, e)).collect();
            for (&(r, col), e) in &m.entries {
                if r != b2 && col != b {
                    new_m.add_entry(r, col, e, &F::one());
                }
            }
            for &(x, delta) in &row_of_b2 {
                let dp = self.compose(delta, &phi_inv);
                for &(y, gamma) in &col_of_b {
                    new_m.add_entry(y, x, &self.compose(&dp, gamma), &F::one().neg());
                }
            }
            let reindex = |k: usize, gone: usize| if k > gone { k - 1 } else { k };
            let mut fixed: Mat<F> = Mat::zero();
            for ((r, col), e) in new_m.entries {
                fixed.entries.insert((reindex(r, b2), reindex(col, b)), e);
            }
            c.d.insert(i, fixed);
            if let Some(prev) = c.d.get(&(i - 1)).cloned() {
                let mut out: Mat<F> = Mat::zero();
                for ((r, col), e) in prev.entries {
                    if r != b {
                        out.entries.insert((reindex(r, b), col), e);
                    }
                }
                c.d.insert(i - 1, out);
            }
            if let Some(next) = c.d.get(&(i + 1)).cloned() {
                let mut out: Mat<F> = Mat::zero();
                for ((r, col), e) in next.entries {
                    if col != b2 {
                        out.entries.insert((r, reindex(col, b2)), e);
                    }
                }
                c.d.insert(i + 1, out);
            }
            c.terms.get_mut(&i).unwrap().remove(b);
            c.terms.get_mut(&(i + 1)).unwrap().remove(b2);
        }
        c.terms.retain(|_, t| !t.is_empty());
        c.d.retain(|_, m| !m.is_zero());
        c
    }

    /// Decide whether two complexes are homotopy equivalent. After minimizing, a
    /// degree-zero cocycle whose constant parts are invertible in every degree is an
    /// isomorphism; such cocycles form a nonempty Zariski-open set when one exists, so
    /// a few random samples decide the question with high probability.
    pub fn homotopy_equivalent<F: Field>(&self, a: &Complex<F>, b: &Complex<F>, seed: u64) -> bool {
        let (a, b) = (self.minimize(a), self.minimize(b));
        if a.signature() != b.signature() {
            return false;
        }
        if a.is_zero() {
            return true;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hc = HomComplex::new(self, &a, &b);
        for _ in 0..6 {
            let z = hc.random_cocycle(0, &mut rng);
            let space = hc.space(0).clone();
            let mats = map_to_matrices(&space, &z);
            if a.terms.iter().all(|(i, t)| self.constant_part_invertible(t, mats.get(i))) {
                return true;
            }
        }
        false
    }

    fn constant_part_invertible<F: Field>(&self, verts: &[usize], m: Option<&Mat<F>>) -> bool {
        let Some(m) = m else { return verts.is_empty() };
        let n = verts.len();
        let mut rows: Vec<SVec<F>> = vec![SVec::new(); n];
        for (&(r, col), e) in &m.entries {
            for (p, x) in e {
                if self.is_trivial(*p) {
                    rows[col].insert(r, x.clone());
                }
            }
        }
        let (rank, _) = rank_and_kernel(&rows);
        rank == n
    }
}

/// `r` copies of `p` and the degree-zero maps spanning `H^0`, placed one per copy.
fn stacked<F: Field>(
    maps: &[BTreeMap<i64, Mat<F>>],
    p: &Complex<F>,
    p_is_target: bool,
) -> (Complex<F>, BTreeMap<i64, Mat<F>>) {
    let mut pr = Complex::zero();
    let mut total: BTreeMap<i64, Mat<F>> = BTreeMap::new();
    for (k, m) in maps.iter().enumerate() {
        for (&i, mat) in m {
            let off = k * p.term(i).len();
            let out = total.entry(i).or_insert_with(Mat::zero);
            for (&(r, c), e) in &mat.entries {
                let (r, c) = if p_is_target { (r + off, c) } else { (r, c + off) };
                out.add_entry(r, c, e, &F::one());
            }
        }
        pr = pr.direct_sum(p);
    }
    (pr, total)
}

fn degree_zero_basis<F: Field>(pa: &PathAlgebra, c: &Complex<F>, d: &Complex<F>) -> Vec<BTreeMap<i64, Mat<F>>> {
    let mut hc = HomComplex::new(pa, c, d);
    let basis = hc.cohomology_basis(0);
    let space = hc.space(0).clone();
    basis.iter().map(|v| map_to_matrices(&space, v)).collect()
}

/// Trace of the trivial-path part of an endomorphism.
fn constant_trace<F: Field>(pa: &PathAlgebra, m: &BTreeMap<i64, Mat<F>>) -> F {
    let mut tr = F::zero();
    for mat in m.values() {
        for (&(r, c), e) in &mat.entries {
            if r == c {
                for (p, x) in e {
                    if pa.is_trivial(*p) {
                        tr = tr.add(x);
                    }
                }
            }
        }
    }
    tr
}

/// A basis of the radical of `End(T)` for an indecomposable minimal `T`: the endomorphisms
/// whose constant part is nilpotent, cut out by the trace.
fn radical_basis<F: Field>(pa: &PathAlgebra, t: &Complex<F>) -> Vec<BTreeMap<i64, Mat<F>>> {
    let mut hc = HomComplex::new(pa, t, t);
    let basis = hc.cohomology_basis(0);
    let space = hc.space(0).clone();
    let traces: Vec<F> = basis.iter().map(|v| constant_trace(pa, &map_to_matrices(&space, v))).collect();
    let Some(pivot) = traces.iter().position(|x| !x.is_zero()) else {
        return basis.iter().map(|v| map_to_matrices(&space, v)).collect();
    };
    let inv = traces[pivot].inv();
    basis
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != pivot)
        .map(|(i, v)| {
            let mut w = v.clone();
            sv_axpy(&mut w, &traces[i].mul(&inv).neg(), &basis[pivot]);
            map_to_matrices(&space, &w)
        })
        .collect()
}

/// Degree-zero maps `X -> T_k` (`left`) or `T_k -> X` spanning a complement of those that
/// factor through the radical of `add(T_1 ⊕ ... ⊕ T_n)`. The `T_i` are pairwise
/// non-isomorphic indecomposables.
fn minimal_maps<F: Field>(
    pa: &PathAlgebra,
    x: &Complex<F>,
    targets: &[Complex<F>],
    k: usize,
    left: bool,
) -> Vec<BTreeMap<i64, Mat<F>>> {
    let tk = &targets[k];
    let mut hc = if left { HomComplex::new(pa, x, tk) } else { HomComplex::new(pa, tk, x) };
    let space = hc.space(0).clone();
    let mut ech = hc.boundaries(0);
    for (j, tj) in targets.iter().enumerate() {
        let rad = match (j == k, left) {
            (true, _) => radical_basis(pa, tk),
            (false, true) => degree_zero_basis(pa, tj, tk),
            (false, false) => degree_zero_basis(pa, tk, tj),
        };
        let through = if left { degree_zero_basis(pa, x, tj) } else { degree_zero_basis(pa, tj, x) };
        for a in &through {
            for r in &rad {
                let comp = if left { compose_maps(pa, a, 0, r) } else { compose_maps(pa, r, 0, a) };
                ech.insert(matrices_to_map(&space, &comp));
            }
        }
    }
    hc.cohomology_basis(0)
        .into_iter()
        .filter(|v| ech.insert(v.clone()))
        .map(|v| map_to_matrices(&space, &v))
        .collect()
}

/// The cone of a minimal left approximation `X -> T_1^{r_1} ⊕ ... ⊕ T_k^{r_k}` (`left`) or
/// the cocone of a minimal right one `T_1^{r_1} ⊕ ... -> X`. The `T_i` are pairwise
/// non-isomorphic indecomposables. Returns the multiplicities `r_i` and the minimized result.
pub fn approximation_cone<F: Field>(
    pa: &PathAlgebra,
    x: &Complex<F>,
    targets: &[Complex<F>],
    left: bool,
) -> (Vec<usize>, Complex<F>) {
    let targets: Vec<Complex<F>> = targets.iter().map(|t| pa.minimize(t)).collect();
    let mut mults = Vec::new();
    let mut sum = Complex::zero();
    let mut phi: BTreeMap<i64, Mat<F>> = BTreeMap::new();
    for (k, t) in targets.iter().enumerate() {
        let maps = minimal_maps(pa, x, &targets, k, left);
        mults.push(maps.len());
        let (block, m) = stacked(&maps, t, left);
        for (i, mat) in m {
            let off = sum.term(i).len();
            let out = phi.entry(i).or_insert_with(Mat::zero);
            for (&(r, c), e) in &mat.entries {
                let (r, c) = if left { (r + off, c) } else { (r, c + off) };
                out.add_entry(r, c, e, &F::one());
            }
        }
        sum = sum.direct_sum(&block);
    }
    let c = if left { cone(x, &sum, &phi) } else { cone(&sum, x, &phi).shift(-1) };
    (mults, pa.minimize(&c))
}

/// `X⟨1⟩`: the cone of a minimal left `add P`-approximation `X -> P^r`, with `r` the
/// dimension of `Hom(X, P)`. Valid when `End(P)` is one-dimensional.
pub fn left_shift<F: Field>(pa: &PathAlgebra, x: &Complex<F>, p: &Complex<F>) -> (usize, Complex<F>) {
    let maps = degree_zero_basis(pa, x, p);
    let (pr, phi) = stacked(&maps, p, true);
    (maps.len(), pa.minimize(&cone(x, &pr, &phi)))
}

/// `X⟨-1⟩`: the cocone of a minimal right `add P`-approximation `P^r -> X`.
pub fn right_shift<F: Field>(pa: &PathAlgebra, x: &Complex<F>, p: &Complex<F>) -> (usize, Complex<F>) {
    let maps = degree_zero_basis(pa, p, x);
    let (pr, psi) = stacked(&maps, p, false);
    (maps.len(), pa.minimize(&cone(&pr, x, &psi).shift(-1)))
}

/// `dim Hom(X, Z)` modulo the maps that factor through `add P`.
pub fn hom_modulo<F: Field>(pa: &PathAlgebra, x: &Complex<F>, z: &Complex<F>, p: &Complex<F>) -> usize {
    let mut hxz = HomComplex::new(pa, x, z);
    let h0 = hxz.cohomology_dim(0);
    if h0 == 0 {
        return 0;
    }
    let phis = degree_zero_basis(pa, x, p);
    let psis = degree_zero_basis(pa, p, z);
    let space = hxz.space(0).clone();
    let mut ech = hxz.boundaries(0);
    let base = ech.rank();
    for phi in &phis {
        for psi in &psis {
            let comp = compose_maps(pa, phi, 0, psi);
            ech.insert(matrices_to_map(&space, &comp));
        }
    }
    h0 - (ech.rank() - base)
}

fn support<F: Field>(c: &Complex<F>) -> Option<(i64, i64)> {
    let ks: Vec<i64> = c.terms.iter().filter(|(_, t)| !t.is_empty()).map(|(&i, _)| i).collect();
    Some((*ks.first()?, *ks.last()?))
}

/// Hom in the orbit category of the reduction by `P`: the sum over `k` of
/// `dim Hom(X, Y⟨k⟩)` modulo maps through `add P`. Each `Y⟨k⟩` is built from cones of
/// approximations. `None` when the orbit does not settle within `limit` steps.
pub fn orbit_hom_in<F: Field>(
    pa: &PathAlgebra,
    x: &Complex<F>,
    y: &Complex<F>,
    p: &Complex<F>,
    limit: usize,
) -> Option<usize> {
    let Some((xlo, xhi)) = support(x) else { return Some(0) };
    let mut total = 0;
    let mut z = pa.minimize(y);
    let mut settled = false;
    for _ in 0..limit {
        total += hom_modulo(pa, x, &z, p);
        let quiet = HomComplex::new(pa, &z, p).all_dims().keys().all(|&d| d > 0);
        if quiet && support(&z).is_none_or(|(_, hi)| hi < xlo) {
            settled = true;
            break;
        }
        z = left_shift(pa, &z, p).1;
    }
    if !settled {
        return None;
    }
    let mut z = right_shift(pa, &pa.minimize(y), p).1;
    for _ in 0..limit {
        total += hom_modulo(pa, x, &z, p);
        let quiet = HomComplex::new(pa, p, &z).all_dims().keys().all(|&d| d < 0);
        if quiet && support(&z).is_none_or(|(lo, _)| lo > xhi) {
            return Some(total);
        }
        z = right_shift(pa, &z, p).1;
    }
    None
}

/// Hom dimensions of two graded curves, computed over the chosen field.
pub fn hom_dims(field: FieldChoice, s: &DissectedSurface, x: &GradedCurve, y: &GradedCurve) -> BTreeMap<i64, usize> {
    let pa = PathAlgebra::new(&s.algebra);
    match field {
        FieldChoice::Rational => hom_dims_in::<Q>(&pa, s, x, y),
        FieldChoice::Prime(p) => {
            set_modulus(p);
            hom_dims_in::<Fp>(&pa, s, x, y)
        }
    }
}

pub fn hom_dims_in<F: Field>(pa: &PathAlgebra, s: &DissectedSurface, x: &GradedCurve, y: &GradedCurve) -> BTreeMap<i64, usize> {
    let cx: Complex<F> = pa.complex_of(s, x);
    let cy: Complex<F> = pa.complex_of(s, y);
    HomComplex::new(pa, &cx, &cy).all_dims()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Letter;
    use crate::surface::tests::{surf, A2, A3_REL, KRONECKER};

    fn kronecker_band(pa: &PathAlgebra, lambda: i64, n: usize, shift: i64) -> Complex<Q> {
        let w = StringWord {
            closed: true,
            start: 0,
            letters: vec![Letter { path: vec![0], inverse: false }, Letter { path: vec![1], inverse: true }],
        };
        pa.string_complex(&w, &[shift, shift + 1], Some((lambda, n)))
    }

    fn projective(v: usize, deg: i64) -> Complex<Q> {
        let mut c = Complex::zero();
        c.add_summand(deg, v);
        c
    }

    #[test]
    fn homs_between_projectives_are_paths() {
        let s = surf(A2);
        let pa = PathAlgebra::new(&s.algebra);
        let (p1, p2) = (projective(0, 0), projective(1, 0));
        assert_eq!(HomComplex::new(&pa, &p1, &p2).all_dims(), BTreeMap::from([(0, 1)]));
        assert!(HomComplex::new(&pa, &p2, &p1).all_dims().is_empty());
        let p2s = projective(1, 2);
        assert_eq!(HomComplex::new(&pa, &p1, &p2s).all_dims(), BTreeMap::from([(2, 1)]));
    }

    #[test]
    fn kronecker_bands() {
        let s = surf(KRONECKER);
        let pa = PathAlgebra::new(&s.algebra);
        let b1 = kronecker_band(&pa, 1, 1, 0);
        assert!(b1.check(&pa).is_ok());
        assert_eq!(HomComplex::new(&pa, &b1, &b1).all_dims(), BTreeMap::from([(0, 1), (1, 1)]));
        let b2 = kronecker_band(&pa, 2, 1, 0);
        assert!(HomComplex::new(&pa, &b1, &b2).all_dims().is_empty());
        let b1x3 = kronecker_band(&pa, 1, 3, 0);
        let b1x2 = kronecker_band(&pa, 1, 2, 0);
        assert!(b1x3.check(&pa).is_ok());
        assert_eq!(HomComplex::new(&pa, &b1x3, &b1x2).all_dims(), BTreeMap::from([(0, 2), (1, 2)]));
        assert!(!pa.homotopy_equivalent(&b1, &b2, 1));
        assert!(pa.homotopy_equivalent(&b1x2, &kronecker_band(&pa, 1, 2, 0), 1));
    }

    #[test]
    fn cone_of_identity_is_contractible() {
        let s = surf(KRONECKER);
        let pa = PathAlgebra::new(&s.algebra);
        let b = kronecker_band(&pa, 3, 2, 0);
        let mut hc = HomComplex::new(&pa, &b, &b);
        let id: BTreeMap<i64, Mat<Q>> = b
            .terms
            .iter()
            .map(|(&i, t)| {
                let mut m = Mat::zero();
                for (k, &v) in t.iter().enumerate() {
                    m.add_entry(k, k, &vec![(v as u32, <Q as Field>::one())], &<Q as Field>::one());
                }
                (i, m)
            })
            .collect();
        let space = hc.space(0).clone();
        assert!(hc.is_cocycle(0, &matrices_to_map(&space, &id)));
        let c = cone(&b, &b, &id);
        assert!(c.check(&pa).is_ok());
        assert!(pa.minimize(&c).is_zero());
    }

    #[test]
    fn minimize_keeps_homotopy_type() {
        let s = surf(A3_REL);
        let pa = PathAlgebra::new(&s.algebra);
        let w = StringWord { closed: false, start: 0, letters: vec![Letter { path: vec![0], inverse: false }] };
        let c: Complex<Q> = pa.string_complex(&w, &[0, 1], None);
        let noisy = c.direct_sum(&cone(&projective(2, 0), &projective(2, 0), &BTreeMap::from([(0, {
            let mut m = Mat::zero();
            m.add_entry(0, 0, &vec![(2, <Q as Field>::one())], &<Q as Field>::one());
            m
        })])));
        assert_eq!(noisy.rank(), 4);
        let m = pa.minimize(&noisy);
        assert_eq!(m.signature(), c.signature());
        assert!(pa.homotopy_equivalent(&noisy, &c, 7));
        assert!(!pa.homotopy_equivalent(&c, &c.shift(1), 7));
    }

    #[test]
    fn prime_field_arithmetic() {
        set_modulus(DEFAULT_PRIME);
        let x = Fp::from_i64(-5);
        assert_eq!(x.mul(&x.inv()), Fp::one());
        assert_eq!(FieldChoice::parse("Fp:7"), Ok(FieldChoice::Prime(7)));
        assert!(FieldChoice::parse("Fp:8").is_err());
        assert_eq!(FieldChoice::parse("Q"), Ok(FieldChoice::Rational));
    }
}
