use serde::{Deserialize, Serialize};

use super::NumericsError;

/// Real symmetric matrix; only the upper triangle is stored, so symmetry is exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    dim: usize,
    upper: Vec<f64>,
}

#[inline]
fn packed(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dim - i * (i + 1) / 2 + j
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            upper: vec![0.0; dim * (dim + 1) / 2],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut s = Self::zeros(dim);
        for i in 0..dim {
            s.set(i, i, 1.0);
        }
        s
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut s = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            s.set(i, i, v);
        }
        s
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut s = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                s.set(i, j, f(i, j));
            }
        }
        s
    }

    /// Reads the upper triangle of a dense row-major matrix.
    pub fn from_dense_upper(dim: usize, dense: &[f64]) -> Self {
        assert_eq!(dense.len(), dim * dim);
        Self::from_fn(dim, |i, j| dense[i * dim + j])
    }

    /// `sum_k w_k v_k v_k^T`.
    pub fn from_outer_products(dim: usize, terms: &[(f64, &[f64])]) -> Self {
        let mut s = Self::zeros(dim);
        for &(w, v) in terms {
            for i in 0..dim {
                for j in i..dim {
                    let idx = packed(dim, i, j);
                    s.upper[idx] += w * v[i] * v[j];
                }
            }
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[packed(self.dim, i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let idx = packed(self.dim, i, j);
        self.upper[idx] = value;
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim;
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = self.get(i, j);
            }
        }
        d
    }

    pub fn is_finite(&self) -> bool {
        self.upper.iter().all(|v| v.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_inner(self).sqrt()
    }

    /// `trace(A B)` for symmetric `A`, `B`.
    pub fn frobenius_inner(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                let p = self.get(i, j) * other.get(i, j);
                acc += if i == j { p } else { 2.0 * p };
            }
        }
        acc
    }

    pub fn scaled(&self, factor: f64) -> SymMatrix {
        SymMatrix {
            dim: self.dim,
            upper: self.upper.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.dim, other.dim);
        SymMatrix {
            dim: self.dim,
            upper: self.upper.iter().zip(&other.upper).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        self.add(&other.scaled(-1.0))
    }

    /// `v^T S v`.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            acc += self.get(i, i) * v[i] * v[i];
            for j in i + 1..self.dim {
                acc += 2.0 * self.get(i, j) * v[i] * v[j];
            }
        }
        acc
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

/// Eigen-decomposition with ascending eigenvalues; `vectors[k]` is the unit
/// eigenvector for `values[k]`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl SymEigen {
    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `V f(Λ) V^T`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let dim = self.values.len();
        let terms: Vec<(f64, &[f64])> = self
            .values
            .iter()
            .zip(&self.vectors)
            .map(|(&l, v)| (f(l), v.as_slice()))
            .filter(|(w, _)| *w != 0.0)
            .collect();
        SymMatrix::from_outer_products(dim, &terms)
    }
}

pub const DEFAULT_EIGEN_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigen-decomposition.
pub fn sym_eigen(s: &SymMatrix, tol: f64) -> Result<SymEigen, NumericsError> {
    if !s.is_finite() {
        return Err(NumericsError::NonFinite);
    }
    let n = s.dim();
    let mut a = s.to_dense();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = s.frobenius_norm().max(1.0);
    let target = 0.25 * tol * scale;
    let mut converged = n <= 1;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - sn * akq;
                    a[k * n + q] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - sn * aqk;
                    a[q * n + k] = sn * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - sn * vkq;
                    v[k * n + q] = sn * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(NumericsError::NonConvergence { sweeps: MAX_SWEEPS });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x * n + x].total_cmp(&a[y * n + y]));
    Ok(SymEigen {
        values: order.iter().map(|&k| a[k * n + k]).collect(),
        vectors: order
            .iter()
            .map(|&k| (0..n).map(|i| v[i * n + k]).collect())
            .collect(),
    })
}

/// Frobenius-nearest positive semidefinite matrix.
pub fn psd_project(s: &SymMatrix) -> Result<SymMatrix, NumericsError> {
    let eig = sym_eigen(s, DEFAULT_EIGEN_TOL)?;
    Ok(eig.reconstruct_with(|l| l.max(0.0)))
}
