mod common;

use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sosdeg::cones::*;
use sosdeg::numerics::{rat, Rational};
use sosdeg::polytope::LatticePolytope;
use sosdeg::variety::{hypersurface_model, toric_model, QuadraticForm};

#[test]
fn gram_slice_shapes() {
    let cubic = toric_model(&LatticePolytope::segment(3));
    let s = build_gram_slice(&cubic).unwrap();
    assert_eq!((s.sigma_matrix().rows(), s.sigma_matrix().cols()), (7, 10));
    assert_eq!(s.kernel_dimension(), 3);
    let surface = toric_model(&LatticePolytope::dilated_simplex(2, 2));
    let s = build_gram_slice(&surface).unwrap();
    assert_eq!((s.sigma_matrix().rows(), s.sigma_matrix().cols()), (15, 21));
    assert_eq!(s.kernel_dimension(), 6);
    assert_eq!(s.sigma_matrix().rank(), 15);
}

#[test]
fn round_trip_and_duality_on_minimal_degree_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for model in common::minimal_degree_models() {
        let slice = build_gram_slice(&model).unwrap();
        let points = common::sphere_samples(&mut rng, &model, 8);
        for _ in 0..5 {
            let g0 = common::random_psd(&mut rng, model.r1_dim());
            let f = slice.sigma(&g0);
            let out = sos_check_values(&f, &slice, &SosOptions::default()).unwrap();
            assert_eq!(out.status, SosStatus::Certificate, "{}", model.name());
            let g = out.gram.unwrap();
            let res: f64 = slice.sigma(&g).iter().zip(&f).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            assert!(res <= 1e-6);
            // a PSD functional is nonnegative on a certified form
            for p in &points {
                let ell = point_evaluation(&slice, p).unwrap();
                assert!(ell.apply(&f) >= -1e-6);
            }
        }
    }
}

#[test]
fn sampled_positive_forms_are_certified() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for model in common::minimal_degree_models() {
        let slice = build_gram_slice(&model).unwrap();
        let samples = common::sphere_samples(&mut rng, &model, 2000);
        for _ in 0..4 {
            let f = common::random_positive_form(&mut rng, &model, &samples, 0.1);
            let out = sos_check_values(&f, &slice, &SosOptions::default()).unwrap();
            assert_eq!(out.status, SosStatus::Certificate, "{} {:?}", model.name(), out.iterations);
        }
    }
}

#[test]
fn cauchy_schwarz_bracket_matches_squares() {
    // ℓ(g²) = S⁻¹ [ (Σ λ_j²/κ_j)(Σ κ_j g(p_j)²) − (Σ λ_j g(p_j))² ] for every g
    let model = hypersurface_model(2, 3).unwrap();
    let slice = build_gram_slice(&model).unwrap();
    let v = |x: &[i64]| x.iter().map(|&t| rat(t)).collect::<Vec<Rational>>();
    let pts = vec![v(&[1, 0, 2]), v(&[0, 1, -1]), v(&[2, 3, 1])];
    let kappas = vec![rat(2), rat(3)];
    let sep = separating_functional_real(&slice, &pts, &kappas).unwrap();
    let s: Rational = (0..2).map(|j| &sep.lambdas[j] * &sep.lambdas[j] / &kappas[j]).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        use rand::Rng;
        let g: Vec<Rational> = (0..3).map(|_| rat(rng.random_range(-9..=9))).collect();
        let gp = |p: &[Rational]| -> Rational { p.iter().zip(&g).map(|(a, b)| a * b).sum() };
        let weighted: Rational = (0..2).map(|j| &kappas[j] * gp(&pts[j]) * gp(&pts[j])).sum();
        let lin: Rational = (0..2).map(|j| &sep.lambdas[j] * gp(&pts[j])).sum();
        let bracket = (&s * weighted - &lin * &lin) / &s;
        assert_eq!(sep.functional.apply_square_exact(&g).unwrap(), bracket);
    }
    assert!(sep.functional.apply_square_exact(&sep.interpolant).unwrap().is_zero());
}

#[test]
fn kernel_dimension_of_generic_evaluations() {
    let model = toric_model(&LatticePolytope::simplex(3));
    let slice = build_gram_slice(&model).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut total = vec![0.0; slice.dim_r2()];
    for _ in 0..4 {
        let p = model.random_real_point(&mut rng).unwrap();
        for (t, v) in total.iter_mut().zip(model.r2_values(&p)) {
            *t += v;
        }
    }
    let ell = DualFunctional::from_values(&slice, total).unwrap();
    assert_eq!(kernel_dimension(&ell, KERNEL_THRESHOLD).unwrap(), 0);
    assert!(!extremality_check(&ell, &slice, KERNEL_THRESHOLD).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn verdicts_are_one_sided(seed in any::<u64>(), shift in -2.0f64..2.0) {
        let model = toric_model(&LatticePolytope::segment(2));
        let slice = build_gram_slice(&model).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g0 = common::random_psd(&mut rng, 3);
        let mut f = slice.sigma(&g0);
        // move along x², which may leave the cone
        f[2] += shift;
        let opts = SosOptions { budget: 4000, ..SosOptions::default() };
        let out = sos_check_values(&f, &slice, &opts).unwrap();
        match out.status {
            SosStatus::Certificate => {
                prop_assert!(out.gram.is_some() && out.dual.is_none());
                prop_assert!(out.gram_eigenvalues.unwrap()[0] >= -1e-8);
            }
            SosStatus::Infeasible => {
                let dual = out.dual.unwrap();
                prop_assert!(out.gram.is_none());
                prop_assert!(moment_psd(&dual, 1e-8).unwrap());
                prop_assert!(dual.apply(&f) < 0.0);
            }
            SosStatus::Undetermined => {}
        }
        // binary quartics are nonnegative iff SOS: compare with a dense scan
        let min = (0..2000)
            .map(|t| {
                let th = std::f64::consts::PI * t as f64 / 2000.0;
                let (c, s) = (th.cos(), th.sin());
                model.eval_form(&f, &[c * c, c * s, s * s])
            })
            .fold(f64::INFINITY, f64::min);
        match out.status {
            SosStatus::Certificate => prop_assert!(min >= -1e-6),
            SosStatus::Infeasible => prop_assert!(min < 0.0),
            SosStatus::Undetermined => prop_assert!(min.abs() < 1e-2),
        }
        let q = QuadraticForm::from_f64(&f).unwrap();
        prop_assert_eq!(q.to_f64(), f);
    }

    #[test]
    fn moment_is_adjoint_to_sigma(seed in any::<u64>()) {
        let model = sosdeg::variety::scroll_model(&[1, 2]).unwrap();
        let slice = build_gram_slice(&model).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_psd(&mut rng, 5);
        let ell: Vec<f64> = common::random_psd(&mut rng, 5).to_dense()[..slice.dim_r2()].to_vec();
        let lhs: f64 = slice.sigma(&g).iter().zip(&ell).map(|(a, b)| a * b).sum();
        let rhs = slice.moment(&ell).frobenius_inner(&g);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }
}
