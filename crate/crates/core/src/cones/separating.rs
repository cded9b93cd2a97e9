//! Point evaluations and the separating functionals built from `e + 2`
//! points of a linear section.

use num_traits::{One, Signed, Zero};

use super::{ConeError, DualFunctional, GramSlice};
use crate::numerics::{Rational, RationalMatrix};
use crate::variety::monomial_pairs;

/// A separating functional together with the data that explains it.
#[derive(Debug, Clone)]
pub struct SeparatingFunctional {
    pub functional: DualFunctional,
    /// Coefficients of the linear dependency, normalized so the last one is 1.
    pub lambdas: Vec<Rational>,
    /// All weights, including the derived ones.
    pub kappas: Vec<Rational>,
    /// A linear form `g` with `ℓ(g²) = 0`.
    pub interpolant: Vec<Rational>,
}

/// The functional `(p*)²`: evaluation of forms at `p`. Floating-point version.
pub fn point_evaluation(slice: &GramSlice<'_>, p: &[f64]) -> Result<DualFunctional, ConeError> {
    check_point_len(slice, p.len())?;
    DualFunctional::from_values(slice, slice.model().r2_values(p))
}

pub fn point_evaluation_exact(slice: &GramSlice<'_>, p: &[Rational]) -> Result<DualFunctional, ConeError> {
    check_point_len(slice, p.len())?;
    check_on_variety(slice, p, None)?;
    let values = (0..slice.dim_r2())
        .map(|r| {
            let (i, j) = slice.model().r2_representative(r);
            &p[i] * &p[j]
        })
        .collect();
    DualFunctional::from_exact(slice, values)
}

fn check_point_len(slice: &GramSlice<'_>, len: usize) -> Result<(), ConeError> {
    if len != slice.dim_r1() {
        return Err(ConeError::DimensionMismatch { expected: slice.dim_r1(), found: len });
    }
    Ok(())
}

// Every relation must vanish at `a` (and at `a + ib` when `b` is given).
fn check_on_variety(slice: &GramSlice<'_>, a: &[Rational], b: Option<&[Rational]>) -> Result<(), ConeError> {
    let pairs = monomial_pairs(slice.dim_r1());
    for (n, rel) in slice.model().relations().iter().enumerate() {
        let mut re = Rational::zero();
        let mut im = Rational::zero();
        for (idx, c) in rel.coefficients() {
            let (i, j) = pairs[idx];
            re += &c * &a[i] * &a[j];
            if let Some(b) = b {
                re -= &c * &b[i] * &b[j];
                im += &c * (&a[i] * &b[j] + &b[i] * &a[j]);
            }
        }
        if !re.is_zero() || !im.is_zero() {
            return Err(ConeError::InvalidArgument(format!("point does not satisfy relation {n}")));
        }
    }
    Ok(())
}

fn outer_add(m: &mut RationalMatrix, u: &[Rational], v: &[Rational], c: &Rational) {
    for i in 0..u.len() {
        for j in 0..v.len() {
            let x = m.get(i, j) + c * &u[i] * &v[j];
            m.set(i, j, x);
        }
    }
}

// The one-dimensional nullspace of the matrix with the given columns.
fn unique_dependency(columns: &[&[Rational]]) -> Result<Vec<Rational>, ConeError> {
    let rows = columns[0].len();
    let mut m = RationalMatrix::zeros(rows, columns.len())?;
    for (j, c) in columns.iter().enumerate() {
        for i in 0..rows {
            m.set(i, j, c[i].clone());
        }
    }
    let mut null = m.nullspace();
    if null.len() != 1 {
        return Err(ConeError::DegeneratePosition(format!(
            "the evaluations satisfy {} independent linear relations, expected exactly one",
            null.len()
        )));
    }
    Ok(null.pop().unwrap())
}

fn require_nonzero(v: &[Rational]) -> Result<(), ConeError> {
    match v.iter().position(Zero::is_zero) {
        Some(j) => Err(ConeError::DegeneratePosition(format!("point {j} does not take part in the linear relation"))),
        None => Ok(()),
    }
}

fn moment_to_values(slice: &GramSlice<'_>, m: &RationalMatrix) -> Result<DualFunctional, ConeError> {
    let values = (0..slice.dim_r2())
        .map(|r| {
            let (i, j) = slice.model().r2_representative(r);
            m.get(i, j).clone()
        })
        .collect();
    let ell = DualFunctional::from_exact(slice, values)?;
    if ell.exact_moment.as_ref() != Some(m) {
        return Err(ConeError::InconsistentModel("moment matrix is not in the image of σ*".into()));
    }
    Ok(ell)
}

fn check_kappas(kappas: &[Rational], expected: usize) -> Result<(), ConeError> {
    if kappas.len() != expected {
        return Err(ConeError::DimensionMismatch { expected, found: kappas.len() });
    }
    if kappas.iter().any(|k| !k.is_positive()) {
        return Err(ConeError::InvalidArgument("weights must be positive".into()));
    }
    Ok(())
}

/// `ℓ = Σ_{j ≤ e+1} κ_j (p_j*)² − κ_{e+2} (p_{e+2}*)²` from `e + 2` real
/// points of a linear section, where `Σ λ_j p_j* + p_{e+2}* = 0` and
/// `κ_{e+2} = (Σ λ_j² / κ_j)⁻¹`.
pub fn separating_functional_real(
    slice: &GramSlice<'_>,
    points: &[Vec<Rational>],
    kappas: &[Rational],
) -> Result<SeparatingFunctional, ConeError> {
    let e = slice.model().e();
    if points.len() != e + 2 {
        return Err(ConeError::DimensionMismatch { expected: e + 2, found: points.len() });
    }
    check_kappas(kappas, e + 1)?;
    for p in points {
        check_point_len(slice, p.len())?;
        check_on_variety(slice, p, None)?;
    }
    let columns: Vec<&[Rational]> = points.iter().map(Vec::as_slice).collect();
    let dependency = unique_dependency(&columns)?;
    require_nonzero(&dependency)?;
    let lambdas: Vec<Rational> = dependency.iter().map(|x| x / &dependency[e + 1]).collect();

    let s: Rational = lambdas[..=e].iter().zip(kappas).map(|(l, k)| l * l / k).sum();
    let last = Rational::one() / &s;
    let k = slice.dim_r1();
    let mut m = RationalMatrix::zeros(k, k)?;
    for (p, kappa) in points.iter().zip(kappas) {
        outer_add(&mut m, p, p, kappa);
    }
    outer_add(&mut m, &points[e + 1], &points[e + 1], &-last.clone());
    let functional = moment_to_values(slice, &m)?;

    // g(p_j) = λ_j / κ_j for j ≤ e + 1
    let rows: Vec<Vec<Rational>> = points[..=e].to_vec();
    let rhs: Vec<Rational> = lambdas[..=e].iter().zip(kappas).map(|(l, k)| l / k).collect();
    let interpolant = RationalMatrix::from_rows(&rows)?
        .solve(&rhs)
        .ok_or_else(|| ConeError::DegeneratePosition("no linear form interpolates the weights".into()))?;

    let mut all = kappas.to_vec();
    all.push(last);
    Ok(SeparatingFunctional { functional, lambdas, kappas: all, interpolant })
}

/// The conjugate-pair variant: `e` real points and a pair `a ± ib`, with
/// `ℓ = Σ κ_j (p_j*)² − κ_{e+1}((a*)² − (b*)²) + κ_{e+2}(2 a* b*)`.
///
/// `pair_kappas = (κ_{e+1}, κ_{e+2})` must satisfy
/// `(κ_{e+1}² + κ_{e+2}²) / κ_{e+1} = (Σ λ_j² / κ_j)⁻¹`; when omitted,
/// `κ_{e+2} = 0` is used.
pub fn separating_functional_complex(
    slice: &GramSlice<'_>,
    real_points: &[Vec<Rational>],
    pair: (&[Rational], &[Rational]),
    kappas: &[Rational],
    pair_kappas: Option<(Rational, Rational)>,
) -> Result<SeparatingFunctional, ConeError> {
    let e = slice.model().e();
    if real_points.len() != e {
        return Err(ConeError::DimensionMismatch { expected: e, found: real_points.len() });
    }
    check_kappas(kappas, e)?;
    let (a, b) = pair;
    for p in real_points.iter().map(Vec::as_slice).chain([a, b]) {
        check_point_len(slice, p.len())?;
    }
    for p in real_points {
        check_on_variety(slice, p, None)?;
    }
    check_on_variety(slice, a, Some(b))?;

    // The dependency Σ λ_j p_j + α a + β b = 0 fixes the representative
    // (α − iβ)(a + ib) of the pair, whose real part then closes the relation.
    let mut columns: Vec<&[Rational]> = real_points.iter().map(Vec::as_slice).collect();
    columns.push(a);
    let real_pair = b.iter().all(Zero::is_zero);
    if !real_pair {
        columns.push(b);
    }
    let dependency = unique_dependency(&columns)?;
    require_nonzero(&dependency[..e])?;
    let (alpha, beta) = if real_pair {
        (dependency[e].clone(), Rational::zero())
    } else {
        (dependency[e].clone(), dependency[e + 1].clone())
    };
    if alpha.is_zero() && beta.is_zero() {
        return Err(ConeError::DegeneratePosition("the conjugate pair does not take part in the linear relation".into()));
    }
    let (a, b): (Vec<Rational>, Vec<Rational>) = a
        .iter()
        .zip(b)
        .map(|(x, y)| (&alpha * x + &beta * y, &alpha * y - &beta * x))
        .unzip();
    let (a, b) = (a.as_slice(), b.as_slice());
    let lambdas: Vec<Rational> = dependency[..e].iter().cloned().chain([Rational::one()]).collect();
    let s: Rational = lambdas[..e].iter().zip(kappas).map(|(l, k)| l * l / k).sum();
    let target = Rational::one() / &s;
    let (k1, k2) = match pair_kappas {
        Some((k1, k2)) => {
            if !k1.is_positive() || (&k1 * &k1 + &k2 * &k2) / &k1 != target {
                return Err(ConeError::InvalidArgument(
                    "pair weights must satisfy (κ₁² + κ₂²)/κ₁ = (Σ λ²/κ)⁻¹ with κ₁ > 0".into(),
                ));
            }
            (k1, k2)
        }
        None => (target, Rational::zero()),
    };

    let k = slice.dim_r1();
    let mut m = RationalMatrix::zeros(k, k)?;
    for (p, kappa) in real_points.iter().zip(kappas) {
        outer_add(&mut m, p, p, kappa);
    }
    outer_add(&mut m, a, a, &-k1.clone());
    outer_add(&mut m, b, b, &k1);
    outer_add(&mut m, a, b, &k2);
    outer_add(&mut m, b, a, &k2);
    let functional = moment_to_values(slice, &m)?;

    // g(p_j) = λ_j / κ_j and κ_{e+1} b(g) + κ_{e+2} a(g) = 0
    let mut rows: Vec<Vec<Rational>> = real_points.to_vec();
    rows.push(a.iter().zip(b).map(|(x, y)| &k2 * x + &k1 * y).collect());
    let mut rhs: Vec<Rational> = lambdas[..e].iter().zip(kappas).map(|(l, k)| l / k).collect();
    rhs.push(Rational::zero());
    let interpolant = RationalMatrix::from_rows(&rows)?
        .solve(&rhs)
        .ok_or_else(|| ConeError::DegeneratePosition("no linear form interpolates the weights".into()))?;

    let mut all = kappas.to_vec();
    all.push(k1);
    all.push(k2);
    Ok(SeparatingFunctional { functional, lambdas, kappas: all, interpolant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::{build_gram_slice, moment_psd};
    use crate::numerics::{rat, rat_frac};
    use crate::variety::hypersurface_model;

    fn v(x: &[i64]) -> Vec<Rational> {
        x.iter().map(|&t| rat(t)).collect()
    }

    #[test]
    fn three_collinear_points_on_a_plane_cubic() {
        let model = hypersurface_model(2, 3).unwrap();
        let slice = build_gram_slice(&model).unwrap();
        // on the line z = x + y
        let pts = vec![v(&[1, 0, 1]), v(&[0, 1, 1]), v(&[1, 2, 3])];
        let sep = separating_functional_real(&slice, &pts, &[rat(1), rat(1)]).unwrap();
        // p_3 = p_1 + 2 p_2, so λ = (-1, -2) and κ_3 = 1/5
        assert_eq!(sep.lambdas, vec![rat(-1), rat(-2), rat(1)]);
        assert_eq!(sep.kappas[2], rat_frac(1, 5));
        assert!(sep.functional.exact_moment.as_ref().unwrap().is_psd());
        assert!(moment_psd(&sep.functional, 1e-12).unwrap());
        assert!(sep.functional.apply_square_exact(&sep.interpolant).unwrap().is_zero());
        // the defining linear form of the line is also annihilated
        assert!(sep.functional.apply_square_exact(&v(&[1, 1, -1])).unwrap().is_zero());
    }

    #[test]
    fn symmetric_points_give_a_symmetric_functional() {
        let model = hypersurface_model(2, 3).unwrap();
        let slice = build_gram_slice(&model).unwrap();
        let pts = vec![v(&[1, 0, 1]), v(&[0, 1, 1]), v(&[1, 1, 2])];
        let swapped = vec![v(&[0, 1, 1]), v(&[1, 0, 1]), v(&[1, 1, 2])];
        let one = [rat(1), rat(1)];
        let a = separating_functional_real(&slice, &pts, &one).unwrap();
        let b = separating_functional_real(&slice, &swapped, &one).unwrap();
        assert_eq!(a.functional.exact, b.functional.exact);
    }

    #[test]
    fn degenerate_points_are_rejected() {
        let model = hypersurface_model(2, 3).unwrap();
        let slice = build_gram_slice(&model).unwrap();
        let general = vec![v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])];
        let one = [rat(1), rat(1)];
        assert!(matches!(
            separating_functional_real(&slice, &general, &one),
            Err(ConeError::DegeneratePosition(_))
        ));
        let repeated = vec![v(&[1, 0, 1]), v(&[2, 0, 2]), v(&[0, 1, 1])];
        assert!(matches!(
            separating_functional_real(&slice, &repeated, &one),
            Err(ConeError::DegeneratePosition(_))
        ));
    }

    #[test]
    fn conjugate_pair_functional() {
        let model = hypersurface_model(2, 3).unwrap();
        let slice = build_gram_slice(&model).unwrap();
        // real point (1,0,1) and the pair (1,1,2) ± i(1,-1,0) on the line z = x + y
        let p = vec![v(&[1, 0, 1])];
        let (a, b) = (v(&[1, 1, 2]), v(&[1, -1, 0]));
        let sep = separating_functional_complex(&slice, &p, (&a, &b), &[rat(1)], None).unwrap();
        assert!(sep.functional.exact_moment.as_ref().unwrap().is_psd());
        assert!(sep.functional.apply_square_exact(&sep.interpolant).unwrap().is_zero());

        // p - (a + b)/2 = 0, so with representative (1 - i)(a + ib) the
        // dependency is λ = -2 and the target is 1/4, met by κ = (1/8, 1/8)
        assert_eq!(sep.lambdas, vec![rat(-2), rat(1)]);
        let w = rat_frac(1, 8);
        let sep2 =
            separating_functional_complex(&slice, &p, (&a, &b), &[rat(1)], Some((w.clone(), w.clone()))).unwrap();
        assert!(sep2.functional.exact_moment.as_ref().unwrap().is_psd());
        assert!(sep2.functional.apply_square_exact(&sep2.interpolant).unwrap().is_zero());
        assert!(separating_functional_complex(&slice, &p, (&a, &b), &[rat(1)], Some((w, rat(1)))).is_err());
    }

    #[test]
    fn real_pair_reduces_to_the_real_formula() {
        let model = hypersurface_model(2, 3).unwrap();
        let slice = build_gram_slice(&model).unwrap();
        let p = vec![v(&[1, 0, 1])];
        let a = v(&[2, 0, 2]);
        let zero = v(&[0, 0, 0]);
        // a = 2 p_1 is the only dependency: λ = -2, so κ_{e+1} = 1/4
        let sep = separating_functional_complex(&slice, &p, (&a, &zero), &[rat(1)], None).unwrap();
        let mut m = RationalMatrix::zeros(3, 3).unwrap();
        outer_add(&mut m, &p[0], &p[0], &rat(1));
        outer_add(&mut m, &a, &a, &rat_frac(-1, 4));
        assert_eq!(sep.functional.exact_moment.unwrap(), m);
    }
}
