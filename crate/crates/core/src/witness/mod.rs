//! Nonnegative forms that are not sums of squares on the Veronese surface
//! `ν_d(P²)`, `d ≥ 3`, with an exact certificate for the non-SOS side.
//!
//! The linear sections `h_1`, `h_2` are products of `d` rational linear
//! forms, so the `d²` intersection points are exact.

mod forms;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cones::{
    build_gram_slice, extremality_check, kernel_dimension, min_moment_eigenvalue, moment_psd, separating_functional_real,
    sos_check, ConeError, SosOptions, SosStatus, KERNEL_THRESHOLD,
};
use crate::json::{self, ExactVec};
use crate::numerics::{
    primitive_integer_vector, rank_of_vectors, rat, rat_to_f64, NumericsError, Rational, RationalMatrix,
};
use crate::variety::{epsilon, veronese_model, Coordinate, QuadraticForm, VarietyError, VarietyModel};

pub use forms::{Exponent, FloatForm, TernaryForm};
use forms::{monomial_at, monomial_derivative_at};

/// Number of fresh hyperplane draws before giving up.
pub const MAX_DRAWS: usize = 200;
const MAX_DELTA_HALVINGS: i32 = 60;
const COEFFICIENT_RANGE: i64 = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WitnessError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no admissible hyperplane sections after {attempts} draws")]
    RetryExhausted { attempts: usize },
    #[error("forms vanishing at the selected points span dimension {dimension}, expected {expected}")]
    DegenerateSpan { dimension: usize, expected: usize },
    #[error("every solution lies in the span of the products h_i h_j")]
    EmptyComplement,
    #[error("no δ ≥ 2^-60 passed the sampled nonnegativity test")]
    NoDeltaFound,
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Variety(#[from] VarietyError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// The model `ν_d(P²)` with its monomial bases in `x, y, z`.
#[derive(Debug, Clone)]
pub struct VeronesePlane {
    pub d: usize,
    pub model: VarietyModel,
    pub r1: Vec<Exponent>,
    pub r2: Vec<Exponent>,
}

impl VeronesePlane {
    pub fn new(d: usize) -> Result<Self, WitnessError> {
        let model = veronese_model(2, d)?;
        let d32 = d as u32;
        let r1 = model
            .r1_basis()
            .iter()
            .map(|c| match c {
                Coordinate::Exponent(e) => [e[0] as u32, e[1] as u32, d32 - (e[0] + e[1]) as u32],
                Coordinate::Symbol(_) => unreachable!("toric coordinates"),
            })
            .collect();
        let r2 = model
            .r2_exponents()
            .expect("toric model")
            .iter()
            .map(|u| [u.0[0] as u32, u.0[1] as u32, 2 * d32 - (u.0[0] + u.0[1]) as u32])
            .collect();
        Ok(VeronesePlane { d, model, r1, r2 })
    }

    /// `e = n - m` for `ν_d(P²)`.
    pub fn codim(&self) -> usize {
        self.model.e()
    }

    /// The Veronese image of a point, in the coordinates of `R_1`.
    pub fn nu(&self, p: &[Rational; 3]) -> Vec<Rational> {
        self.r1.iter().map(|e| monomial_at(e, p)).collect()
    }

    pub fn eval_r1(&self, h: &[Rational], p: &[Rational; 3]) -> Rational {
        h.iter().zip(&self.r1).map(|(c, e)| c * monomial_at(e, p)).sum()
    }

    pub fn eval_r2(&self, f: &[Rational], p: &[Rational; 3]) -> Rational {
        f.iter().zip(&self.r2).map(|(c, e)| c * monomial_at(e, p)).sum()
    }

    /// `h_i h_j` in the coordinates of `R_2`.
    pub fn product(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        TernaryForm::from_vector(&self.r1, a)
            .mul(&TernaryForm::from_vector(&self.r1, b))
            .to_vector(&self.r2)
    }

    /// Forms of degree `d` vanishing at all given points.
    pub fn vanishing_space(&self, points: &[[Rational; 3]]) -> Result<Vec<Vec<Rational>>, WitnessError> {
        if points.is_empty() {
            return Ok((0..self.r1.len())
                .map(|i| (0..self.r1.len()).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
                .collect());
        }
        let rows: Vec<Vec<Rational>> = points.iter().map(|p| self.nu(p)).collect();
        Ok(RationalMatrix::from_rows(&rows)?.nullspace())
    }
}

/// An exact projective point of `P²` with its role in the construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessPoint {
    pub coords: ExactVec,
    /// One of the `e` points where the witness vanishes.
    pub selected: bool,
    /// One of the `e + 2` points used for the separating functional.
    pub in_functional: bool,
}

impl WitnessPoint {
    pub fn triple(&self) -> [Rational; 3] {
        [self.coords.0[0].clone(), self.coords.0[1].clone(), self.coords.0[2].clone()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hyperplanes {
    /// Linear factors `ℓ_1, …, ℓ_d` of `h_1`, as coefficients of `x, y, z`.
    pub h1_factors: Vec<ExactVec>,
    pub h2_factors: Vec<ExactVec>,
    /// `h_0, h_1, h_2` in the coordinates of `R_1`.
    pub h0: ExactVec,
    pub h1: ExactVec,
    pub h2: ExactVec,
}

/// Output of [`choose_hyperplanes`].
#[derive(Debug, Clone)]
pub struct Section {
    pub h1_factors: Vec<[Rational; 3]>,
    pub h2_factors: Vec<[Rational; 3]>,
    pub h1: Vec<Rational>,
    pub h2: Vec<Rational>,
    /// All `d²` intersection points; the first `e + 2` are in linearly
    /// general position and feed the separating functional.
    pub points: Vec<[Rational; 3]>,
    pub draws: usize,
}

fn cross(a: &[i64; 3], b: &[i64; 3]) -> [i64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

// Primitive integer representative with a positive first nonzero entry.
fn normalize_point(p: [i64; 3]) -> [i64; 3] {
    use num_integer::Integer;
    let g = p.iter().fold(0i64, |g, &x| g.gcd(&x));
    let mut q = p.map(|x| x / g);
    if q.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        q = q.map(|x| -x);
    }
    q
}

fn to_rational3(p: &[i64; 3]) -> [Rational; 3] {
    [rat(p[0]), rat(p[1]), rat(p[2])]
}

/// Whether `e + 1` of the vectors, whichever one is dropped, stay independent
/// while all of them span exactly `e + 1` dimensions.
fn general_position(vectors: &[Vec<Rational>]) -> Result<bool, WitnessError> {
    let n = vectors.len();
    let rank = rank_of_vectors(vectors);
    if rank + 1 != n {
        return Ok(false);
    }
    let rows: Vec<Vec<Rational>> = (0..vectors[0].len()).map(|i| vectors.iter().map(|v| v[i].clone()).collect()).collect();
    let null = RationalMatrix::from_rows(&rows)?.nullspace();
    Ok(null.len() == 1 && null[0].iter().all(|x| !x.is_zero()))
}

// Lexicographic k-subsets of 0..n, at most `limit` of them.
fn subsets(n: usize, k: usize, limit: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        if out.len() >= limit {
            return out;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Step 1: `h_1 = ℓ_1⋯ℓ_d`, `h_2 = m_1⋯m_d` with random small integer
/// coefficients, redrawn until the `d²` points `ℓ_i ∩ m_j` are distinct and
/// `e + 2` of them are in linearly general position on `ν_d(P²)`.
pub fn choose_hyperplanes(d: usize, seed: u64) -> Result<Section, WitnessError> {
    if d < 3 {
        return Err(WitnessError::InvalidArgument("the construction needs d >= 3".into()));
    }
    let plane = VeronesePlane::new(d)?;
    let e = plane.codim();
    let spare = d * d - (e + 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for draw in 1..=MAX_DRAWS {
        let lines: Vec<[i64; 3]> = (0..2 * d)
            .map(|_| std::array::from_fn(|_| rng.random_range(-COEFFICIENT_RANGE..=COEFFICIENT_RANGE)))
            .collect();
        let (ls, ms) = lines.split_at(d);
        let raw: Vec<[i64; 3]> = ls.iter().flat_map(|l| ms.iter().map(move |m| cross(l, m))).collect();
        if raw.contains(&[0, 0, 0]) {
            continue;
        }
        let pts: Vec<[i64; 3]> = raw.into_iter().map(normalize_point).collect();
        let mut sorted = pts.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != pts.len() {
            continue;
        }
        let exact: Vec<[Rational; 3]> = pts.iter().map(to_rational3).collect();
        let images: Vec<Vec<Rational>> = exact.iter().map(|p| plane.nu(p)).collect();
        if rank_of_vectors(&images) != e + 1 {
            continue;
        }
        // set aside `spare` points so that the rest are in general position
        let Some(unused) = subsets(d * d, spare, 2000).into_iter().find(|skip| {
            let used: Vec<Vec<Rational>> =
                (0..d * d).filter(|i| !skip.contains(i)).map(|i| images[i].clone()).collect();
            general_position(&used).unwrap_or(false)
        }) else {
            continue;
        };
        let order: Vec<usize> = (0..d * d).filter(|i| !unused.contains(i)).chain(unused.iter().copied()).collect();
        let product = |fs: &[[i64; 3]]| {
            fs.iter()
                .fold(TernaryForm::one(), |acc, l| acc.mul(&TernaryForm::linear(&to_rational3(l))))
                .to_vector(&plane.r1)
        };
        return Ok(Section {
            h1_factors: ls.iter().map(to_rational3).collect(),
            h2_factors: ms.iter().map(to_rational3).collect(),
            h1: product(ls),
            h2: product(ms),
            points: order.iter().map(|&i| exact[i].clone()).collect(),
            draws: draw,
        });
    }
    Err(WitnessError::RetryExhausted { attempts: MAX_DRAWS })
}

/// Step 1, continued: a form `h_0` vanishing at the selected points but at
/// none of the other intersection points, such that `h_0, h_1, h_2` span all
/// degree-`d` forms through the selected points.
pub fn fit_h0(
    plane: &VeronesePlane,
    points: &[[Rational; 3]],
    selected: &[usize],
    h1: &[Rational],
    h2: &[Rational],
    seed: u64,
) -> Result<Vec<Rational>, WitnessError> {
    let m = plane.model.m();
    let sel: Vec<[Rational; 3]> = selected.iter().map(|&i| points[i].clone()).collect();
    let space = plane.vanishing_space(&sel)?;
    if space.len() != m + 1 {
        return Err(WitnessError::DegenerateSpan { dimension: space.len(), expected: m + 1 });
    }
    let others: Vec<&[Rational; 3]> = (0..points.len()).filter(|i| !selected.contains(i)).map(|i| &points[i]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0001);
    for _ in 0..64 {
        let coeffs: Vec<i64> = (0..space.len()).map(|_| rng.random_range(-3..=3)).collect();
        let h0: Vec<Rational> = (0..plane.r1.len())
            .map(|k| space.iter().zip(&coeffs).map(|(v, &c)| &v[k] * rat(c)).sum())
            .collect();
        if others.iter().any(|p| plane.eval_r1(&h0, p).is_zero()) {
            continue;
        }
        if rank_of_vectors(&[h0.clone(), h1.to_vec(), h2.to_vec()]) != m + 1 {
            continue;
        }
        let h0: Vec<Rational> = primitive_integer_vector(&h0).into_iter().map(Rational::from_integer).collect();
        return Ok(h0);
    }
    Err(WitnessError::DegenerateSpan { dimension: space.len(), expected: m + 1 })
}

/// Output of [`build_f`].
#[derive(Debug, Clone)]
pub struct FormSolution {
    pub f: Vec<Rational>,
    /// Dimension of the solution space modulo the products `h_i h_j`.
    pub quotient_dimension: usize,
    pub solution_dimension: usize,
    pub epsilon: usize,
}

/// Step 2: a form of degree `2d` singular at every selected point and not in
/// the span of the products `h_i h_j`.
pub fn build_f(
    plane: &VeronesePlane,
    points: &[[Rational; 3]],
    selected: &[usize],
    h: [&[Rational]; 3],
) -> Result<FormSolution, WitnessError> {
    let mut rows = Vec::with_capacity(3 * selected.len());
    for &s in selected {
        for k in 0..3 {
            rows.push(plane.r2.iter().map(|e| monomial_derivative_at(e, k, &points[s])).collect::<Vec<_>>());
        }
    }
    let solutions = RationalMatrix::from_rows(&rows)?.nullspace();
    let products = products_of(plane, h);
    let base_rank = rank_of_vectors(&products);
    let mut all = products.clone();
    all.extend(solutions.iter().cloned());
    let total_rank = rank_of_vectors(&all);
    if total_rank != solutions.len() {
        // the products must already be solutions
        return Err(WitnessError::EmptyComplement);
    }
    let quotient_dimension = total_rank - base_rank;
    let eps = epsilon(&plane.model)?;
    let mut basis = products;
    for v in &solutions {
        basis.push(v.clone());
        if rank_of_vectors(&basis) > base_rank {
            let f: Vec<Rational> = primitive_integer_vector(v).into_iter().map(Rational::from_integer).collect();
            let f = match_scale(f, &[&basis[0], &basis[3], &basis[5]]);
            if quotient_dimension < eps {
                return Err(WitnessError::EmptyComplement);
            }
            return Ok(FormSolution { f, quotient_dimension, solution_dimension: solutions.len(), epsilon: eps });
        }
        basis.pop();
    }
    Err(WitnessError::EmptyComplement)
}

// f is only fixed up to a positive multiple; a power of two bringing its
// coefficients to the size of h_0², h_1², h_2² keeps δ away from underflow.
fn match_scale(f: Vec<Rational>, squares: &[&Vec<Rational>]) -> Vec<Rational> {
    let largest = |v: &[Rational]| v.iter().map(|x| rat_to_f64(x).abs()).fold(0.0f64, f64::max);
    let target = squares.iter().map(|v| largest(v)).fold(0.0f64, f64::max);
    let own = largest(&f);
    if target == 0.0 || own == 0.0 || !target.is_finite() || !own.is_finite() {
        return f;
    }
    let factor = power_of_two((target / own).log2().round() as i32);
    f.into_iter().map(|x| x * &factor).collect()
}

fn products_of(plane: &VeronesePlane, h: [&[Rational]; 3]) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    for i in 0..3 {
        for j in i..3 {
            out.push(plane.product(h[i], h[j]));
        }
    }
    out
}

/// Sampling summary for the nonnegativity of the witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonnegEvidence {
    pub count: usize,
    pub min_value: f64,
    /// `min_value` divided by the largest sampled `δ|f| + Σ h_i²`.
    pub margin: f64,
}

/// Sample points: uniform on the unit sphere, plus shells around each
/// selected point where the witness vanishes.
pub fn sample_points(
    samples: usize,
    seed: u64,
    around: &[[Rational; 3]],
) -> Vec<[f64; 3]> {
    const CHUNK: usize = 4096;
    let chunks = samples.div_ceil(CHUNK);
    let mut pts: Vec<[f64; 3]> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64 + 1);
            let len = CHUNK.min(samples - c * CHUNK);
            (0..len).map(move |_| random_unit(&mut rng)).collect::<Vec<_>>()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for p in around {
        let c = unit(&p.clone().map(|x| rat_to_f64(&x)));
        for r in [1e-1, 1e-2, 1e-3, 1e-4] {
            for _ in 0..64 {
                let v = random_unit(&mut rng);
                let t = dot3(&v, &c);
                let tangent = [v[0] - t * c[0], v[1] - t * c[1], v[2] - t * c[2]];
                pts.push(unit(&[c[0] + r * tangent[0], c[1] + r * tangent[1], c[2] + r * tangent[2]]));
            }
        }
    }
    pts
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn unit(p: &[f64; 3]) -> [f64; 3] {
    let n = dot3(p, p).sqrt();
    p.map(|x| x / n)
}

fn random_unit<R: Rng>(rng: &mut R) -> [f64; 3] {
    use rand_distr::{Distribution, StandardNormal};
    loop {
        let p: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(rng));
        let n = dot3(&p, &p);
        if n > 1e-12 {
            return unit(&p);
        }
    }
}

/// Values of `f` and `h_0² + h_1² + h_2²` at the sample points.
pub fn sample_values(plane: &VeronesePlane, f: &[Rational], h: [&[Rational]; 3], pts: &[[f64; 3]]) -> Vec<(f64, f64)> {
    let ff = FloatForm::new(&plane.r2, f);
    let hf: Vec<FloatForm> = h.iter().map(|v| FloatForm::new(&plane.r1, v)).collect();
    pts.par_iter()
        .map(|p| (ff.eval(p), hf.iter().map(|g| g.eval(p).powi(2)).sum()))
        .collect()
}

/// Evidence for `δ f + Σ h_i² ≥ 0` from precomputed samples.
pub fn sampled_minimum(values: &[(f64, f64)], delta: f64) -> NonnegEvidence {
    let mut min = f64::INFINITY;
    let mut scale = 0.0f64;
    for &(f, s) in values {
        min = min.min(delta * f + s);
        scale = scale.max(delta * f.abs() + s);
    }
    NonnegEvidence { count: values.len(), min_value: min, margin: if scale > 0.0 { min / scale } else { 0.0 } }
}

/// Relative margin accepted by [`delta_search`].
pub const NONNEG_MARGIN: f64 = -1e-9;

/// Step 3: `δ = 2^-k`, starting from `inf Σ h_i² / sup |f|` away from the
/// selected points and halved until the sampled minimum is nonnegative up to
/// [`NONNEG_MARGIN`].
pub fn delta_search(
    plane: &VeronesePlane,
    f: &[Rational],
    h: [&[Rational]; 3],
    selected: &[[Rational; 3]],
    samples: usize,
    seed: u64,
) -> Result<(Rational, NonnegEvidence), WitnessError> {
    let pts = sample_points(samples, seed, selected);
    let values = sample_values(plane, f, h, &pts);
    let centers: Vec<[f64; 3]> = selected.iter().map(|p| unit(&p.clone().map(|x| rat_to_f64(&x)))).collect();
    let mut inf_h = f64::INFINITY;
    let mut sup_f = 0.0f64;
    for (p, &(fv, s)) in pts.iter().zip(&values).take(samples) {
        if centers.iter().all(|c| dot3(p, c).abs() < 0.98) {
            inf_h = inf_h.min(s);
            sup_f = sup_f.max(fv.abs());
        }
    }
    let start = if sup_f > 0.0 && inf_h.is_finite() && inf_h > 0.0 { (inf_h / sup_f).log2().floor() as i32 } else { 0 };
    let mut k = start.min(MAX_DELTA_HALVINGS);
    while k >= -MAX_DELTA_HALVINGS {
        let delta = 2f64.powi(k);
        let ev = sampled_minimum(&values, delta);
        if ev.margin >= NONNEG_MARGIN {
            return Ok((power_of_two(k), ev));
        }
        k -= 1;
    }
    Err(WitnessError::NoDeltaFound)
}

fn power_of_two(k: i32) -> Rational {
    let p = BigInt::one() << k.unsigned_abs();
    if k >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// Exact rank data behind [`certify_not_sos`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotSosCertificate {
    /// Dimension of the degree-`d` forms vanishing at the selected points.
    pub vanishing_dimension: usize,
    /// Rank of `h_0, h_1, h_2`, all of which vanish at the selected points.
    pub h_rank: usize,
    pub h_vanish_at_selected: bool,
    /// Rank of the products `h_i h_j`, without and with `f`.
    pub products_rank: usize,
    pub products_with_f_rank: usize,
    pub f_vanishes_at_selected: bool,
    pub witness_matches: bool,
}

impl NotSosCertificate {
    pub fn holds(&self) -> bool {
        self.vanishing_dimension == self.h_rank
            && self.h_vanish_at_selected
            && self.products_with_f_rank == self.products_rank + 1
            && self.f_vanishes_at_selected
            && self.witness_matches
    }
}

/// Data about the separating functional attached to a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSummary {
    pub values: ExactVec,
    pub lambdas: ExactVec,
    pub interpolant: ExactVec,
    pub moment_psd: bool,
    /// Smallest eigenvalue of `σ*(ℓ)` scaled to unit Frobenius norm.
    pub min_eigenvalue: f64,
    /// `ℓ(g² + h_1² + h_2²) = 0`, exactly.
    pub annihilates_squares: bool,
    pub kernel_dimension: usize,
    pub extremal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SosSummary {
    pub status: SosStatus,
    pub iterations: usize,
    pub residual: f64,
    pub dual_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub d: usize,
    pub seed: u64,
    /// Hyperplane draws and Step-1/2 restarts used.
    pub draws: usize,
    pub attempts: usize,
    pub hyperplanes: Hyperplanes,
    pub points: Vec<WitnessPoint>,
    /// Monomial exponents `(a, b, c)` of `x^a y^b z^c` for `R_1` and `R_2`.
    pub r1_exponents: Vec<Exponent>,
    pub r2_exponents: Vec<Exponent>,
    pub f: QuadraticForm,
    pub quotient_dimension: usize,
    pub epsilon: usize,
    #[serde(with = "json::rational")]
    pub delta: Rational,
    pub witness: QuadraticForm,
    pub not_sos_certificate: NotSosCertificate,
    pub certified_not_sos: bool,
    pub nonneg_evidence: NonnegEvidence,
    pub functional: Option<FunctionalSummary>,
    pub sos_check: Option<SosSummary>,
}

impl WitnessReport {
    pub fn selected_points(&self) -> Vec<[Rational; 3]> {
        self.points.iter().filter(|p| p.selected).map(WitnessPoint::triple).collect()
    }
}

/// Recomputes the certificate from the report data alone.
pub fn not_sos_certificate(report: &WitnessReport) -> Result<NotSosCertificate, WitnessError> {
    let plane = VeronesePlane::new(report.d)?;
    let selected = report.selected_points();
    let h = [&report.hyperplanes.h0.0[..], &report.hyperplanes.h1.0[..], &report.hyperplanes.h2.0[..]];
    if h.iter().any(|v| v.len() != plane.r1.len()) || report.f.len() != plane.r2.len() || report.witness.len() != plane.r2.len() {
        return Err(WitnessError::InvalidArgument("vector lengths do not match ν_d(P²)".into()));
    }
    let vanishing_dimension = plane.vanishing_space(&selected)?.len();
    let h_rank = rank_of_vectors(&h.iter().map(|v| v.to_vec()).collect::<Vec<_>>());
    let h_vanish_at_selected = selected.iter().all(|p| h.iter().all(|v| plane.eval_r1(v, p).is_zero()));
    let products = products_of(&plane, h);
    let products_rank = rank_of_vectors(&products);
    let mut with_f = products.clone();
    with_f.push(report.f.coefficients.clone());
    let products_with_f_rank = rank_of_vectors(&with_f);
    let f_vanishes_at_selected = selected.iter().all(|p| plane.eval_r2(&report.f.coefficients, p).is_zero());
    let expected = witness_form(&plane, &report.f.coefficients, &report.delta, h);
    Ok(NotSosCertificate {
        vanishing_dimension,
        h_rank,
        h_vanish_at_selected,
        products_rank,
        products_with_f_rank,
        f_vanishes_at_selected,
        witness_matches: expected == report.witness.coefficients,
    })
}

/// Exact check that `δ f + Σ h_i²` is not a sum of squares for any `δ > 0`:
/// every degree-`d` form through the selected points lies in
/// `span{h_0, h_1, h_2}`, `f` vanishes there, and `f ∉ span{h_i h_j}`.
pub fn certify_not_sos(report: &WitnessReport) -> bool {
    report.delta.is_positive() && not_sos_certificate(report).is_ok_and(|c| c.holds())
}

fn witness_form(plane: &VeronesePlane, f: &[Rational], delta: &Rational, h: [&[Rational]; 3]) -> Vec<Rational> {
    let mut w: Vec<Rational> = f.iter().map(|c| c * delta).collect();
    for v in h {
        for (a, b) in w.iter_mut().zip(plane.product(v, v)) {
            *a += b;
        }
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessOptions {
    pub samples: usize,
    /// Iteration budget for the numerical SOS check; 0 skips it.
    pub sos_budget: usize,
    pub attach_functional: bool,
    pub max_attempts: usize,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions { samples: 100_000, sos_budget: 100_000, attach_functional: true, max_attempts: 8 }
    }
}

pub fn hilbert_witness(d: usize, seed: u64) -> Result<WitnessReport, WitnessError> {
    hilbert_witness_with(d, seed, &WitnessOptions::default())
}

/// The full construction. Step-1/2 failures redraw the hyperplanes with a
/// derived seed, up to `max_attempts` times.
pub fn hilbert_witness_with(d: usize, seed: u64, options: &WitnessOptions) -> Result<WitnessReport, WitnessError> {
    let plane = VeronesePlane::new(d)?;
    let e = plane.codim();
    let mut last_err = WitnessError::RetryExhausted { attempts: 0 };
    for attempt in 0..options.max_attempts.max(1) {
        let sub_seed = seed.wrapping_add((attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let section = choose_hyperplanes(d, sub_seed)?;
        let selected: Vec<usize> = (0..e).collect();
        let h0 = match fit_h0(&plane, &section.points, &selected, &section.h1, &section.h2, sub_seed) {
            Ok(h0) => h0,
            Err(err @ WitnessError::DegenerateSpan { .. }) => {
                last_err = err;
                continue;
            }
            Err(err) => return Err(err),
        };
        let h = [&h0[..], &section.h1[..], &section.h2[..]];
        let sol = match build_f(&plane, &section.points, &selected, h) {
            Ok(sol) => sol,
            Err(WitnessError::EmptyComplement) => {
                last_err = WitnessError::EmptyComplement;
                continue;
            }
            Err(err) => return Err(err),
        };
        let sel_points: Vec<[Rational; 3]> = selected.iter().map(|&i| section.points[i].clone()).collect();
        let (delta, evidence) = delta_search(&plane, &sol.f, h, &sel_points, options.samples, sub_seed)?;
        let witness = witness_form(&plane, &sol.f, &delta, h);
        let to_vec = |v: &[Rational]| ExactVec(v.to_vec());
        let points = section
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| WitnessPoint { coords: to_vec(p), selected: i < e, in_functional: i < e + 2 })
            .collect();
        let mut report = WitnessReport {
            d,
            seed,
            draws: section.draws,
            attempts: attempt + 1,
            hyperplanes: Hyperplanes {
                h1_factors: section.h1_factors.iter().map(|l| to_vec(l)).collect(),
                h2_factors: section.h2_factors.iter().map(|l| to_vec(l)).collect(),
                h0: to_vec(&h0),
                h1: to_vec(&section.h1),
                h2: to_vec(&section.h2),
            },
            points,
            r1_exponents: plane.r1.clone(),
            r2_exponents: plane.r2.clone(),
            f: QuadraticForm::new(sol.f),
            quotient_dimension: sol.quotient_dimension,
            epsilon: sol.epsilon,
            delta,
            witness: QuadraticForm::new(witness),
            not_sos_certificate: NotSosCertificate {
                vanishing_dimension: 0,
                h_rank: 0,
                h_vanish_at_selected: false,
                products_rank: 0,
                products_with_f_rank: 0,
                f_vanishes_at_selected: false,
                witness_matches: false,
            },
            certified_not_sos: false,
            nonneg_evidence: evidence,
            functional: None,
            sos_check: None,
        };
        report.not_sos_certificate = not_sos_certificate(&report)?;
        report.certified_not_sos = certify_not_sos(&report);
        if options.attach_functional {
            report.functional = Some(attach_functional(&plane, &section, h)?);
        }
        if options.sos_budget > 0 {
            let slice = build_gram_slice(&plane.model)?;
            let opts = SosOptions { budget: options.sos_budget, ..SosOptions::default() };
            let out = sos_check(&report.witness, &slice, &opts)?;
            report.sos_check = Some(SosSummary {
                status: out.status,
                iterations: out.iterations,
                residual: out.residual,
                dual_value: out.dual_value,
            });
        }
        return Ok(report);
    }
    Err(last_err)
}

/// The separating functional of the `e + 2` general points with unit weights.
pub fn attach_functional(
    plane: &VeronesePlane,
    section: &Section,
    h: [&[Rational]; 3],
) -> Result<FunctionalSummary, WitnessError> {
    let e = plane.codim();
    let slice = build_gram_slice(&plane.model)?;
    let pts: Vec<Vec<Rational>> = section.points[..e + 2].iter().map(|p| plane.nu(p)).collect();
    let kappas = vec![Rational::one(); e + 1];
    let sep = separating_functional_real(&slice, &pts, &kappas)?;
    let ell = &sep.functional;
    let annihilated = [&sep.interpolant[..], h[1], h[2]]
        .iter()
        .map(|g| ell.apply_square_exact(g).unwrap_or_else(|| rat(1)))
        .fold(Rational::zero(), |acc, v| acc + v);
    Ok(FunctionalSummary {
        values: ExactVec(ell.exact.clone().unwrap_or_default()),
        lambdas: ExactVec(sep.lambdas.clone()),
        interpolant: ExactVec(sep.interpolant.clone()),
        moment_psd: moment_psd(ell, 1e-8)? && ell.exact_moment.as_ref().is_some_and(RationalMatrix::is_psd),
        min_eigenvalue: min_moment_eigenvalue(&ell.normalized())?,
        annihilates_squares: annihilated.is_zero(),
        kernel_dimension: kernel_dimension(ell, KERNEL_THRESHOLD)?,
        extremal: extremality_check(ell, &slice, KERNEL_THRESHOLD)?,
    })
}
