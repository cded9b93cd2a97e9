//! The Gram map `σ: Sym²(R_1) → R_2`, SOS membership, dual functionals with
//! their moment matrices, and spectrahedral extremality checks.

mod separating;
mod sos;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json::ExactVec;
use crate::numerics::{rat_to_f64, sym_eigen, NumericsError, Rational, RationalMatrix, SymMatrix, DEFAULT_EIGEN_TOL};
use crate::variety::{monomial_pairs, QuadraticForm, VarietyModel};

pub use separating::{
    point_evaluation, point_evaluation_exact, separating_functional_complex, separating_functional_real,
    SeparatingFunctional,
};
pub use sos::{sos_check, sos_check_values, SosOptions, SosOutcome, SosStatus};

/// Eigenvalues below this fraction of the largest one count as zero.
pub const KERNEL_THRESHOLD: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConeError {
    #[error("inconsistent model: {0}")]
    InconsistentModel(String),
    #[error("expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("points are not in linearly general position: {0}")]
    DegeneratePosition(String),
    #[error("eigenvalue {value:e} is within a factor 10 of the kernel threshold {threshold:e}")]
    RankAmbiguity { value: f64, threshold: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// The Gram map of a model, with the normal matrix `σσ*` factored once.
#[derive(Debug, Clone)]
pub struct GramSlice<'a> {
    model: &'a VarietyModel,
    pairs: Vec<(usize, usize)>,
    exact: Vec<Vec<(usize, Rational)>>,
    images: Vec<Vec<(usize, f64)>>,
    // lower Cholesky factor of σσ*, row-major
    chol: Vec<f64>,
}

pub fn build_gram_slice(model: &VarietyModel) -> Result<GramSlice<'_>, ConeError> {
    let k = model.r1_dim();
    let pairs = monomial_pairs(k);
    let dim = model.dim_r2();
    let exact: Vec<Vec<(usize, Rational)>> = (0..pairs.len()).map(|idx| model.reduce_monomial(idx)).collect();

    let mut sigma = RationalMatrix::zeros(dim.max(1), pairs.len())?;
    for (idx, img) in exact.iter().enumerate() {
        for (r, c) in img {
            sigma.set(*r, idx, c.clone());
        }
    }
    let rank = if dim == 0 { 0 } else { sigma.rank() };
    if rank != dim {
        return Err(ConeError::InconsistentModel(format!("σ has rank {rank}, expected dim R_2 = {dim}")));
    }
    if pairs.len() - dim != model.i2_len() {
        return Err(ConeError::InconsistentModel(format!(
            "kernel of σ has dimension {}, but {} relations were given",
            pairs.len() - dim,
            model.i2_len()
        )));
    }
    for (i, rel) in model.relations().iter().enumerate() {
        let mut image = vec![Rational::zero(); dim];
        for (idx, c) in rel.coefficients() {
            for (r, v) in &exact[idx] {
                image[*r] += c.clone() * v;
            }
        }
        if image.iter().any(|v| !v.is_zero()) {
            return Err(ConeError::InconsistentModel(format!("relation {i} is not in the kernel of σ")));
        }
    }

    let images: Vec<Vec<(usize, f64)>> = exact
        .iter()
        .map(|img| img.iter().map(|(r, c)| (*r, rat_to_f64(c))).collect())
        .collect();
    let mut normal = vec![0.0; dim * dim];
    for (idx, img) in images.iter().enumerate() {
        let w = weight(pairs[idx]);
        for &(r, a) in img {
            for &(s, b) in img {
                normal[r * dim + s] += w * a * b;
            }
        }
    }
    let chol = cholesky(&normal, dim)
        .ok_or_else(|| ConeError::InconsistentModel("normal matrix σσ* is not positive definite".into()))?;
    Ok(GramSlice { model, pairs, exact, images, chol })
}

fn weight((i, j): (usize, usize)) -> f64 {
    if i == j {
        1.0
    } else {
        2.0
    }
}

fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|t| l[i * n + t] * l[j * n + t]).sum();
            if i == j {
                let d = a[i * n + i] - s;
                if d <= 0.0 || !d.is_finite() {
                    return None;
                }
                l[i * n + i] = d.sqrt();
            } else {
                l[i * n + j] = (a[i * n + j] - s) / l[j * n + j];
            }
        }
    }
    Some(l)
}

impl<'a> GramSlice<'a> {
    pub fn model(&self) -> &'a VarietyModel {
        self.model
    }

    pub fn dim_r1(&self) -> usize {
        self.model.r1_dim()
    }

    pub fn dim_r2(&self) -> usize {
        self.model.dim_r2()
    }

    /// The exact matrix of `σ` from the monomial basis of `Sym²(R_1)` to `R_2`.
    pub fn sigma_matrix(&self) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(self.dim_r2().max(1), self.pairs.len()).expect("nonempty");
        for (idx, img) in self.exact.iter().enumerate() {
            for (r, c) in img {
                m.set(*r, idx, c.clone());
            }
        }
        m
    }

    pub fn kernel_dimension(&self) -> usize {
        self.pairs.len() - self.dim_r2()
    }

    /// `σ(G)`: the form `x^T G x` reduced to `R_2`.
    pub fn sigma(&self, g: &SymMatrix) -> Vec<f64> {
        let mut out = vec![0.0; self.dim_r2()];
        for (idx, img) in self.images.iter().enumerate() {
            let (i, j) = self.pairs[idx];
            let v = weight((i, j)) * g.get(i, j);
            if v != 0.0 {
                for &(r, c) in img {
                    out[r] += v * c;
                }
            }
        }
        out
    }

    pub fn sigma_exact(&self, g: &RationalMatrix) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim_r2()];
        let two = Rational::from_integer(2.into());
        for (idx, img) in self.exact.iter().enumerate() {
            let (i, j) = self.pairs[idx];
            let v = if i == j { g.get(i, i).clone() } else { g.get(i, j) * &two };
            if !v.is_zero() {
                for (r, c) in img {
                    out[*r] += &v * c;
                }
            }
        }
        out
    }

    /// The moment matrix `σ*(ℓ)` with entries `ℓ(x_i x_j)`.
    pub fn moment(&self, ell: &[f64]) -> SymMatrix {
        let mut m = SymMatrix::zeros(self.dim_r1());
        for (idx, img) in self.images.iter().enumerate() {
            let (i, j) = self.pairs[idx];
            m.set(i, j, img.iter().map(|&(r, c)| ell[r] * c).sum());
        }
        m
    }

    pub fn moment_exact(&self, ell: &[Rational]) -> RationalMatrix {
        let k = self.dim_r1();
        let mut m = RationalMatrix::zeros(k, k).expect("nonempty");
        for (idx, img) in self.exact.iter().enumerate() {
            let (i, j) = self.pairs[idx];
            let v = img.iter().fold(Rational::zero(), |acc, (r, c)| acc + &ell[*r] * c);
            m.set(i, j, v.clone());
            m.set(j, i, v);
        }
        m
    }

    /// Solves `σσ* x = b`.
    pub fn solve_normal(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim_r2();
        let l = &self.chol;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let s: f64 = (0..i).map(|t| l[i * n + t] * y[t]).sum();
            y[i] = (b[i] - s) / l[i * n + i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|t| l[t * n + i] * x[t]).sum();
            x[i] = (y[i] - s) / l[i * n + i];
        }
        x
    }

    /// Orthogonal projection onto `{G : σ(G) = f}`.
    pub fn project_affine(&self, g: &SymMatrix, f: &[f64]) -> SymMatrix {
        let r: Vec<f64> = self.sigma(g).iter().zip(f).map(|(a, b)| a - b).collect();
        let mu = self.solve_normal(&r);
        g.sub(&self.moment(&mu))
    }

    fn check_len(&self, len: usize) -> Result<(), ConeError> {
        if len != self.dim_r2() {
            return Err(ConeError::DimensionMismatch { expected: self.dim_r2(), found: len });
        }
        Ok(())
    }
}

/// A linear functional on `R_2`, with its moment matrix. Exact functionals
/// also carry rational values and the exact moment matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFunctional {
    pub model: String,
    pub values: Vec<f64>,
    pub exact: Option<Vec<Rational>>,
    pub moment_matrix: SymMatrix,
    pub exact_moment: Option<RationalMatrix>,
}

#[derive(Serialize, Deserialize)]
struct DualJson {
    model: String,
    exact: bool,
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exact_values: Option<ExactVec>,
    moment_matrix: Vec<Vec<f64>>,
}

impl Serialize for DualFunctional {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let k = self.moment_matrix.dim();
        DualJson {
            model: self.model.clone(),
            exact: self.exact.is_some(),
            values: self.values.clone(),
            exact_values: self.exact.clone().map(ExactVec),
            moment_matrix: (0..k).map(|i| (0..k).map(|j| self.moment_matrix.get(i, j)).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DualFunctional {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let j = DualJson::deserialize(d)?;
        let k = j.moment_matrix.len();
        if j.moment_matrix.iter().any(|r| r.len() != k) {
            return Err(D::Error::custom("moment matrix is not square"));
        }
        let dense: Vec<f64> = j.moment_matrix.concat();
        let moment_matrix = SymMatrix::from_dense_upper(k, &dense);
        Ok(DualFunctional {
            model: j.model,
            values: j.values,
            exact: j.exact_values.map(|v| v.0),
            moment_matrix,
            exact_moment: None,
        })
    }
}

impl DualFunctional {
    pub fn from_values(slice: &GramSlice<'_>, values: Vec<f64>) -> Result<Self, ConeError> {
        slice.check_len(values.len())?;
        Ok(DualFunctional {
            model: slice.model.name().to_string(),
            moment_matrix: slice.moment(&values),
            values,
            exact: None,
            exact_moment: None,
        })
    }

    pub fn from_exact(slice: &GramSlice<'_>, values: Vec<Rational>) -> Result<Self, ConeError> {
        slice.check_len(values.len())?;
        let exact_moment = slice.moment_exact(&values);
        let k = exact_moment.rows();
        Ok(DualFunctional {
            model: slice.model.name().to_string(),
            values: values.iter().map(rat_to_f64).collect(),
            moment_matrix: SymMatrix::from_fn(k, |i, j| rat_to_f64(exact_moment.get(i, j))),
            exact: Some(values),
            exact_moment: Some(exact_moment),
        })
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn apply(&self, f: &[f64]) -> f64 {
        self.values.iter().zip(f).map(|(a, b)| a * b).sum()
    }

    pub fn apply_exact(&self, f: &QuadraticForm) -> Option<Rational> {
        let ell = self.exact.as_ref()?;
        Some(ell.iter().zip(&f.coefficients).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
    }

    /// `ℓ(g²)` for a linear form `g`, read off the moment matrix.
    pub fn apply_square_exact(&self, g: &[Rational]) -> Option<Rational> {
        let m = self.exact_moment.as_ref()?;
        let mg = m.mul_vec(g);
        Some(g.iter().zip(&mg).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
    }

    /// Checks that the stored moment matrix is `σ*` of the stored values.
    pub fn verify(&self, slice: &GramSlice<'_>, tol: f64) -> bool {
        if self.values.len() != slice.dim_r2() || self.moment_matrix.dim() != slice.dim_r1() {
            return false;
        }
        if let Some(exact) = &self.exact {
            return self.exact_moment.as_ref().is_none_or(|m| *m == slice.moment_exact(exact));
        }
        let diff = slice.moment(&self.values).sub(&self.moment_matrix).frobenius_norm();
        diff <= tol * self.moment_matrix.frobenius_norm().max(1.0)
    }

    /// The same functional scaled so that its moment matrix has unit Frobenius norm.
    pub fn normalized(&self) -> DualFunctional {
        let norm = self.moment_matrix.frobenius_norm();
        if norm == 0.0 {
            return self.clone();
        }
        DualFunctional {
            model: self.model.clone(),
            values: self.values.iter().map(|v| v / norm).collect(),
            exact: None,
            moment_matrix: self.moment_matrix.scaled(1.0 / norm),
            exact_moment: None,
        }
    }
}

/// `true` iff the smallest eigenvalue of `σ*(ℓ)` is at least `-tol · max(1, ‖σ*(ℓ)‖)`.
pub fn moment_psd(ell: &DualFunctional, tol: f64) -> Result<bool, ConeError> {
    let eig = sym_eigen(&ell.moment_matrix, DEFAULT_EIGEN_TOL)?;
    Ok(eig.min_value() >= -tol * ell.moment_matrix.frobenius_norm().max(1.0))
}

/// Exact PSD test; `None` for floating-point functionals.
pub fn moment_psd_exact(ell: &DualFunctional) -> Option<bool> {
    ell.exact_moment.as_ref().map(RationalMatrix::is_psd)
}

pub fn min_moment_eigenvalue(ell: &DualFunctional) -> Result<f64, ConeError> {
    Ok(sym_eigen(&ell.moment_matrix, DEFAULT_EIGEN_TOL)?.min_value())
}

enum Kernel {
    Exact(Vec<Vec<Rational>>),
    Float(Vec<Vec<f64>>),
}

// eigenvalues counted as zero below `tol * max`, refusing near-threshold ones
fn threshold_count(values: &[f64], tol: f64) -> Result<usize, ConeError> {
    let max = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if max == 0.0 {
        return Ok(values.len());
    }
    let threshold = tol * max;
    let mut count = 0;
    for &v in values {
        let a = v.abs();
        if a > threshold / 10.0 && a < threshold * 10.0 {
            return Err(ConeError::RankAmbiguity { value: v, threshold });
        }
        if a <= threshold / 10.0 {
            count += 1;
        }
    }
    Ok(count)
}

fn kernel(ell: &DualFunctional, tol: f64) -> Result<Kernel, ConeError> {
    if let Some(m) = &ell.exact_moment {
        return Ok(Kernel::Exact(m.nullspace()));
    }
    let eig = sym_eigen(&ell.moment_matrix, DEFAULT_EIGEN_TOL)?;
    let zeros = threshold_count(&eig.values, tol)?;
    // ascending order: the near-zero ones come first once the matrix is PSD
    let mut order: Vec<usize> = (0..eig.values.len()).collect();
    order.sort_by(|&a, &b| eig.values[a].abs().total_cmp(&eig.values[b].abs()));
    Ok(Kernel::Float(order[..zeros].iter().map(|&i| eig.vectors[i].clone()).collect()))
}

/// Dimension of `Ker σ*(ℓ)`: exact for exact functionals, otherwise the
/// number of eigenvalues below `tol · λ_max`.
pub fn kernel_dimension(ell: &DualFunctional, tol: f64) -> Result<usize, ConeError> {
    Ok(match kernel(ell, tol)? {
        Kernel::Exact(v) => v.len(),
        Kernel::Float(v) => v.len(),
    })
}

/// Dimension of `{A ∈ Im σ* : Ker σ*(ℓ) ⊆ Ker A}`.
pub fn face_dimension(ell: &DualFunctional, slice: &GramSlice<'_>, tol: f64) -> Result<usize, ConeError> {
    slice.check_len(ell.values.len())?;
    let dim = slice.dim_r2();
    let k = slice.dim_r1();
    match kernel(ell, tol)? {
        Kernel::Exact(vecs) => {
            if vecs.is_empty() {
                return Ok(dim);
            }
            // row (t, i): Σ_j A(μ)_ij v_t[j] = 0, linear in μ
            let mut rows = vec![vec![Rational::zero(); dim]; vecs.len() * k];
            for (t, v) in vecs.iter().enumerate() {
                for (idx, img) in slice.exact.iter().enumerate() {
                    let (i, j) = slice.pairs[idx];
                    for (r, c) in img {
                        if !v[j].is_zero() {
                            rows[t * k + i][*r] += c * &v[j];
                        }
                        if i != j && !v[i].is_zero() {
                            rows[t * k + j][*r] += c * &v[i];
                        }
                    }
                }
            }
            Ok(dim - RationalMatrix::from_rows(&rows)?.rank())
        }
        Kernel::Float(vecs) => {
            if vecs.is_empty() {
                return Ok(dim);
            }
            let mut rows = vec![vec![0.0; dim]; vecs.len() * k];
            for (t, v) in vecs.iter().enumerate() {
                for (idx, img) in slice.images.iter().enumerate() {
                    let (i, j) = slice.pairs[idx];
                    for &(r, c) in img {
                        rows[t * k + i][r] += c * v[j];
                        if i != j {
                            rows[t * k + j][r] += c * v[i];
                        }
                    }
                }
            }
            let gram = SymMatrix::from_fn(dim, |a, b| rows.iter().map(|row| row[a] * row[b]).sum());
            let eig = sym_eigen(&gram, DEFAULT_EIGEN_TOL)?;
            // singular values squared, so the threshold is squared too
            threshold_count(&eig.values, tol * tol)
        }
    }
}

/// Whether `ℓ` spans an extreme ray of the dual SOS cone: its moment kernel
/// is inclusion-maximal, so the face it determines is one-dimensional.
pub fn extremality_check(ell: &DualFunctional, slice: &GramSlice<'_>, tol: f64) -> Result<bool, ConeError> {
    Ok(face_dimension(ell, slice, tol)? == 1)
}
