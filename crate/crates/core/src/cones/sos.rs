//! SOS membership by alternating projections between the affine slice
//! `{G : σ(G) = f}` and the PSD cone, with a dual separation detector.

use serde::{Deserialize, Serialize};

use super::{ConeError, DualFunctional, GramSlice};
use crate::numerics::{sym_eigen, SymMatrix, DEFAULT_EIGEN_TOL};
use crate::variety::QuadraticForm;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SosOptions {
    pub budget: usize,
    pub feas_tol: f64,
    pub psd_tol: f64,
    pub sep_tol: f64,
    /// Iterations between two runs of the dual detector.
    pub dual_every: usize,
}

impl Default for SosOptions {
    fn default() -> Self {
        SosOptions { budget: 100_000, feas_tol: 1e-7, psd_tol: 1e-8, sep_tol: 1e-7, dual_every: 20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SosStatus {
    Certificate,
    Infeasible,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SosOutcome {
    pub status: SosStatus,
    /// PSD Gram matrix with `σ(gram) = f`, on `Certificate`.
    pub gram: Option<SymMatrix>,
    pub gram_eigenvalues: Option<Vec<f64>>,
    /// Functional with PSD moment matrix and `ℓ(f) < 0`, on `Infeasible`.
    pub dual: Option<DualFunctional>,
    /// `ℓ(f / ‖f‖)` for the reported dual, with `‖σ*(ℓ)‖ = 1`.
    pub dual_value: Option<f64>,
    pub iterations: usize,
    /// `‖σ(G) − f‖` at the last iterate.
    pub residual: f64,
    /// Smallest eigenvalue of the last iterate.
    pub min_eigenvalue: f64,
    pub options: SosOptions,
}

pub fn sos_check(f: &QuadraticForm, slice: &GramSlice<'_>, options: &SosOptions) -> Result<SosOutcome, ConeError> {
    sos_check_values(&f.to_f64(), slice, options)
}

/// As [`sos_check`], for a floating-point form.
///
/// Tolerances apply to the returned certificate both absolutely and relative
/// to `‖f‖`; the dual test is run on `f / ‖f‖` with `‖σ*(ℓ)‖ = 1`.
pub fn sos_check_values(f: &[f64], slice: &GramSlice<'_>, options: &SosOptions) -> Result<SosOutcome, ConeError> {
    slice.check_len(f.len())?;
    if f.iter().any(|v| !v.is_finite()) {
        return Err(ConeError::InvalidArgument("form has non-finite coefficients".into()));
    }
    let k = slice.dim_r1();
    let scale = f.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut outcome = SosOutcome {
        status: SosStatus::Undetermined,
        gram: None,
        gram_eigenvalues: None,
        dual: None,
        dual_value: None,
        iterations: 0,
        residual: 0.0,
        min_eigenvalue: 0.0,
        options: *options,
    };
    if scale == 0.0 {
        outcome.status = SosStatus::Certificate;
        outcome.gram = Some(SymMatrix::zeros(k));
        outcome.gram_eigenvalues = Some(vec![0.0; k]);
        return Ok(outcome);
    }
    let fhat: Vec<f64> = f.iter().map(|v| v / scale).collect();
    let feas = options.feas_tol / scale.max(1.0);
    let psd = options.psd_tol / scale.max(1.0);
    // projecting onto {G ⪰ τ I} keeps interior iterates clear of the boundary
    let margin = psd;
    let shift = SymMatrix::identity(k).scaled(margin);

    let mut g = slice.moment(&slice.solve_normal(&fhat));
    for it in 1..=options.budget {
        outcome.iterations = it;
        let eig = sym_eigen(&g, DEFAULT_EIGEN_TOL)?;
        let residual = norm_diff(&slice.sigma(&g), &fhat);
        outcome.residual = residual * scale;
        outcome.min_eigenvalue = eig.min_value() * scale;
        // half the tolerance, so that recomputed eigenvalues stay inside it
        if eig.min_value() >= -0.5 * psd && residual <= feas {
            outcome.status = SosStatus::Certificate;
            outcome.gram_eigenvalues = Some(eig.values.iter().map(|v| v * scale).collect());
            outcome.gram = Some(g.scaled(scale));
            return Ok(outcome);
        }
        let z = eig.reconstruct_with(|l| (l - margin).max(0.0)).add(&shift);
        if it % options.dual_every.max(1) == 0 {
            if let Some((dual, value)) = dual_candidate(slice, &z.sub(&g), &fhat, options)? {
                outcome.status = SosStatus::Infeasible;
                outcome.dual = Some(dual);
                outcome.dual_value = Some(value);
                return Ok(outcome);
            }
        }
        g = slice.project_affine(&z, &fhat);
    }
    Ok(outcome)
}

fn norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

// ℓ = (σσ*)⁻¹ σ(D), the functional whose moment matrix is the projection of
// the PSD gap D onto Im σ*.
fn dual_candidate(
    slice: &GramSlice<'_>,
    gap: &SymMatrix,
    fhat: &[f64],
    options: &SosOptions,
) -> Result<Option<(DualFunctional, f64)>, ConeError> {
    let ell = slice.solve_normal(&slice.sigma(gap));
    let dual = DualFunctional::from_values(slice, ell)?.normalized();
    if dual.moment_matrix.frobenius_norm() == 0.0 {
        return Ok(None);
    }
    let value = dual.apply(fhat);
    if value > -options.sep_tol {
        return Ok(None);
    }
    let eig = sym_eigen(&dual.moment_matrix, DEFAULT_EIGEN_TOL)?;
    if eig.min_value() < -options.psd_tol {
        return Ok(None);
    }
    Ok(Some((dual, value)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::{build_gram_slice, moment_psd};
    use crate::numerics::rat;
    use crate::polytope::{LatticePoint, LatticePolytope};
    use crate::variety::toric_model;

    #[test]
    fn zero_form_has_zero_certificate() {
        let model = toric_model(&LatticePolytope::dilated_simplex(2, 2));
        let slice = build_gram_slice(&model).unwrap();
        let out = sos_check(&QuadraticForm::zero(15), &slice, &SosOptions::default()).unwrap();
        assert_eq!(out.status, SosStatus::Certificate);
        assert_eq!(out.gram.unwrap(), SymMatrix::zeros(6));
    }

    #[test]
    fn sum_of_squares_is_certified() {
        let model = toric_model(&LatticePolytope::segment(3));
        let slice = build_gram_slice(&model).unwrap();
        let g0 = SymMatrix::from_outer_products(4, &[(1.0, &[1.0, -2.0, 0.5, 1.0]), (2.0, &[0.0, 1.0, 1.0, -1.0])]);
        let f = slice.sigma(&g0);
        let out = sos_check_values(&f, &slice, &SosOptions::default()).unwrap();
        assert_eq!(out.status, SosStatus::Certificate, "{out:?}");
        let gram = out.gram.unwrap();
        assert!(norm_diff(&slice.sigma(&gram), &f) <= 1e-7);
        assert!(out.gram_eigenvalues.unwrap()[0] >= -1e-8);
    }

    #[test]
    fn motzkin_form_is_infeasible() {
        let q = LatticePolytope::from_vertices(&[vec![0, 0], vec![2, 1], vec![1, 2]]).unwrap();
        let model = toric_model(&q);
        let slice = build_gram_slice(&model).unwrap();
        let exps = model.r2_exponents().unwrap();
        let coef = |u: &LatticePoint| match u.0.as_slice() {
            [0, 0] | [4, 2] | [2, 4] => rat(1),
            [2, 2] => rat(-3),
            _ => rat(0),
        };
        let f = QuadraticForm::new(exps.iter().map(coef).collect());
        let out = sos_check(&f, &slice, &SosOptions::default()).unwrap();
        assert_eq!(out.status, SosStatus::Infeasible, "{out:?}");
        let dual = out.dual.unwrap();
        assert!(moment_psd(&dual, 1e-8).unwrap());
        assert!(dual.apply(&f.to_f64()) < 0.0);
    }

    #[test]
    fn outcome_round_trips_through_json() {
        let model = toric_model(&LatticePolytope::simplex(1));
        let slice = build_gram_slice(&model).unwrap();
        let out = sos_check_values(&[1.0, 0.0, 1.0], &slice, &SosOptions::default()).unwrap();
        let s = serde_json::to_string(&out).unwrap();
        let back: SosOutcome = serde_json::from_str(&s).unwrap();
        assert_eq!(back.status, out.status);
        assert_eq!(back.gram, out.gram);
    }
}
