mod common;

use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use sosdeg::cones::*;
use sosdeg::numerics::{Rational, SymMatrix};
use sosdeg::polytope::*;
use sosdeg::variety::{epsilon, is_minimal_degree, segre_veronese_model, toric_model, veronese_model};
use sosdeg::witness::*;

type Criterion<'a> = (&'static str, Duration, Box<dyn FnOnce() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    if took > limit {
        out.pass = false;
        out.detail.push_str(&format!("; over the {}s budget", limit.as_secs()));
    }
    (out, took)
}

fn veronese_scan() -> Outcome {
    let mut wrong = Vec::new();
    for n in 1..=6 {
        for d in 1..=6 {
            let got = is_minimal_degree(&veronese_model(n, d).unwrap()).unwrap();
            let expected = d == 1 || n == 1 || (n, d) == (2, 2);
            if got != expected {
                wrong.push((n, d));
            }
        }
    }
    check(wrong.is_empty(), format!("36 Veronese models, mismatches {wrong:?}"))
}

fn biform_scan() -> Outcome {
    let mut wrong = Vec::new();
    let mut minimal = 0;
    for n1 in 1..=3 {
        for n2 in 1..=3 {
            for d1 in 1..=3 {
                for d2 in 1..=3 {
                    let got = is_minimal_degree(&segre_veronese_model(&[n1, n2], &[d1, d2]).unwrap()).unwrap();
                    let expected = (n1 == 1 && d2 == 1) || (n2 == 1 && d1 == 1);
                    minimal += usize::from(got);
                    if got != expected {
                        wrong.push((n1, n2, d1, d2));
                    }
                }
            }
        }
    }
    check(wrong.is_empty(), format!("81 biform models, {minimal} of minimal degree, mismatches {wrong:?}"))
}

fn two_normal_corpus() -> Vec<LatticePolytope> {
    common::corpus(2024, 200, 4, true)
}

fn deficiency_bridge(corpus: &[LatticePolytope]) -> Outcome {
    let bad = corpus
        .iter()
        .filter(|q| epsilon(&toric_model(q)).ok() != Some(h_star(q).get(2) as usize))
        .count();
    let positive = corpus.iter().filter(|q| h_star(q).get(2) > 0).count();
    check(bad == 0, format!("{} polytopes, {positive} with h*_2 > 0, {bad} mismatches", corpus.len()))
}

fn higashitani_family() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for k in 1..=3u64 {
        let q = LatticePolytope::higashitani(5, k as i64).unwrap();
        let h = h_star(&q).coefficients;
        ok &= h == vec![1, 0, 0, k, 0, 0];
        let density = real_density(&q);
        match k {
            1 => ok &= density == Density::NotDense,
            2 => ok &= density == Density::Dense,
            _ => {}
        }
        parts.push(format!("k={k}: h*={h:?} {density:?}"));
    }
    check(ok, parts.join(", "))
}

fn degree_one_equivalence(corpus: &[LatticePolytope]) -> Outcome {
    let mut disagreements = 0;
    let mut degree_one = 0;
    for q in corpus {
        let h = h_star(q);
        let a = is_normal(q) && h.get(2) == 0;
        let b = polytope_degree(q) <= 1;
        let c = (2..=q.dim()).all(|j| h.get(j) == 0);
        degree_one += usize::from(b);
        if !(a == b && b == c) {
            disagreements += 1;
        }
    }
    check(disagreements == 0, format!("{} polytopes, {degree_one} of degree one, {disagreements} disagreements", corpus.len()))
}

fn hilbert_witnesses() -> Outcome {
    let options = WitnessOptions::default();
    let results: Vec<(u64, Result<WitnessReport, WitnessError>, Duration)> = (0..10u64)
        .into_par_iter()
        .map(|seed| {
            let start = Instant::now();
            let r = hilbert_witness_with(3, seed, &options);
            (seed, r, start.elapsed())
        })
        .collect();
    let mut successes = 0;
    let mut problems = Vec::new();
    let mut slowest = Duration::ZERO;
    let mut worst_margin = f64::INFINITY;
    for (seed, r, took) in results {
        slowest = slowest.max(took);
        let report = match r {
            Ok(report) => report,
            Err(e) => {
                problems.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        successes += 1;
        let sos = report.sos_check.as_ref().map(|s| s.status);
        worst_margin = worst_margin.min(report.nonneg_evidence.margin);
        if !certify_not_sos(&report) {
            problems.push(format!("seed {seed}: certificate fails"));
        }
        if report.nonneg_evidence.margin < -1e-9 || report.nonneg_evidence.count < 100_000 {
            problems.push(format!("seed {seed}: sampled margin {:e}", report.nonneg_evidence.margin));
        }
        if sos.is_none() || sos == Some(SosStatus::Certificate) {
            problems.push(format!("seed {seed}: sos verdict {sos:?}"));
        }
        if report.quotient_dimension != 1 {
            problems.push(format!("seed {seed}: quotient dimension {}", report.quotient_dimension));
        }
        if took > Duration::from_secs(120) {
            problems.push(format!("seed {seed}: {:.1}s", took.as_secs_f64()));
        }
    }
    let pass = successes >= 9 && problems.is_empty();
    check(
        pass,
        format!(
            "{successes}/10 seeds, worst margin {worst_margin:.2e}, slowest seed {:.1}s{}",
            slowest.as_secs_f64(),
            if problems.is_empty() { String::new() } else { format!(", {}", problems.join("; ")) }
        ),
    )
}

fn separating_functional_at_cubic() -> Outcome {
    let options = WitnessOptions { samples: 10_000, sos_budget: 0, attach_functional: false, ..WitnessOptions::default() };
    let report = hilbert_witness_with(3, 7, &options).unwrap();
    let plane = VeronesePlane::new(3).unwrap();
    let slice = build_gram_slice(&plane.model).unwrap();
    let e = plane.codim();
    let pts: Vec<Vec<Rational>> = report.points[..e + 2]
        .iter()
        .map(|p| plane.nu(&[p.coords.0[0].clone(), p.coords.0[1].clone(), p.coords.0[2].clone()]))
        .collect();
    let kappas = vec![Rational::from_integer(1.into()); e + 1];
    let sep = separating_functional_real(&slice, &pts, &kappas).unwrap();
    let ell = &sep.functional;
    let psd = moment_psd(ell, 1e-8).unwrap();
    let min_eig = min_moment_eigenvalue(&ell.normalized()).unwrap();
    let hs = &report.hyperplanes;
    let total = [&sep.interpolant[..], &hs.h1.0[..], &hs.h2.0[..]]
        .iter()
        .map(|g| ell.apply_square_exact(g).unwrap())
        .fold(Rational::zero(), |a, b| a + b);
    let extremal = extremality_check(ell, &slice, KERNEL_THRESHOLD).unwrap();
    let kernel = kernel_dimension(ell, KERNEL_THRESHOLD).unwrap();
    let pass = psd && min_eig >= -1e-8 && total.is_zero() && (!extremal || kernel == 3);
    check(
        pass,
        format!("min eigenvalue {min_eig:.2e}, ℓ(g²+h1²+h2²) = {total}, extremal {extremal}, kernel dimension {kernel}"),
    )
}

fn minimal_degree_positivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut total = 0;
    let mut certified = 0;
    let mut infeasible = 0;
    let mut rejected = 0;
    for model in common::minimal_degree_models() {
        let slice = build_gram_slice(&model).unwrap();
        let u = slice.sigma(&SymMatrix::identity(model.r1_dim()));
        let samples = common::sphere_samples(&mut rng, &model, 10_000);
        let mut forms: Vec<Vec<f64>> = (0..50).map(|_| slice.sigma(&common::random_psd(&mut rng, model.r1_dim()))).collect();
        let mut kept = 0;
        while kept < 50 {
            // random form, shifted by a random multiple of Σ x_i², kept if sampled nonnegative
            let g: Vec<f64> = (0..model.dim_r2()).map(|_| StandardNormal.sample(&mut rng)).collect();
            let shift: f64 = rng.random_range(0.0..6.0);
            let f: Vec<f64> = g.iter().zip(&u).map(|(a, b)| a + shift * b).collect();
            if samples.iter().all(|p| model.eval_form(&f, p) >= 0.0) {
                forms.push(f);
                kept += 1;
            } else {
                rejected += 1;
            }
        }
        for f in &forms {
            let out = sos_check_values(f, &slice, &SosOptions::default()).unwrap();
            total += 1;
            match out.status {
                SosStatus::Certificate => certified += 1,
                SosStatus::Infeasible => infeasible += 1,
                SosStatus::Undetermined => {}
            }
        }
    }
    let undetermined = total - certified - infeasible;
    let pass = infeasible == 0 && undetermined * 20 <= total;
    check(
        pass,
        format!("{total} forms ({rejected} random draws rejected), {certified} certified, {undetermined} undetermined, {infeasible} infeasible"),
    )
}

fn amgm_reeve() -> Outcome {
    let q = LatticePolytope::reeve(5).unwrap();
    let Some(f) = amgm_witness(&q) else {
        return check(false, "no witness returned");
    };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = f64::INFINITY;
    for _ in 0..10_000 {
        let z: Vec<f64> = (0..3)
            .map(|_| {
                let r = (rng.random_range(-1.5f64..1.5)).exp();
                if rng.random_bool(0.5) { r } else { -r }
            })
            .collect();
        worst = worst.min(f.eval(&z) / f.abs_eval(&z));
    }
    // no two lattice points of Q sum to the negative exponent, so no sum of
    // squares supported on Q can produce it
    let u = diagonal_gram_obstruction(&f, &q);
    let pts = q.lattice_points(1);
    let independent = u.as_ref().is_some_and(|u| {
        !f.coefficient(u).is_zero()
            && !pts.iter().any(|a| pts.iter().any(|b| &a.add(b) == u))
    });
    check(
        worst >= -1e-12 && independent && f.len() == 5,
        format!("{} terms, worst relative value {worst:.2e}, obstruction at {:?}", f.len(), u.map(|p| p.0)),
    )
}

fn sos_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut failures = 0;
    let mut worst_residual = 0.0f64;
    let mut worst_eig = f64::INFINITY;
    for model in common::minimal_degree_models() {
        let slice = build_gram_slice(&model).unwrap();
        for _ in 0..100 {
            let f = slice.sigma(&common::random_psd(&mut rng, model.r1_dim()));
            let out = sos_check_values(&f, &slice, &SosOptions::default()).unwrap();
            let Some(g) = out.gram.filter(|_| out.status == SosStatus::Certificate) else {
                failures += 1;
                continue;
            };
            let res = slice.sigma(&g).iter().zip(&f).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let eig = sosdeg::numerics::sym_eigen(&g, sosdeg::numerics::DEFAULT_EIGEN_TOL).unwrap().min_value();
            worst_residual = worst_residual.max(res);
            worst_eig = worst_eig.min(eig);
            if res > 1e-6 || eig < -1e-8 {
                failures += 1;
            }
        }
    }
    check(
        failures == 0,
        format!("400 forms, {failures} failures, worst residual {worst_residual:.2e}, worst eigenvalue {worst_eig:.2e}"),
    )
}

#[test]
fn acceptance() {
    let corpus = two_normal_corpus();
    let secs = Duration::from_secs;
    let criteria: Vec<Criterion<'_>> = vec![
        ("Veronese minimal degree scan", secs(10), Box::new(veronese_scan)),
        ("biform minimal degree scan", secs(30), Box::new(biform_scan)),
        ("deficiency equals h*_2", secs(120), Box::new(|| deficiency_bridge(&corpus))),
        ("Higashitani family", secs(10), Box::new(higashitani_family)),
        ("degree one equivalence", secs(120), Box::new(|| degree_one_equivalence(&corpus))),
        ("ternary sextic witness", secs(10 * 120), Box::new(hilbert_witnesses)),
        ("separating functional", secs(30), Box::new(separating_functional_at_cubic)),
        ("minimal degree positivity", secs(300), Box::new(minimal_degree_positivity)),
        ("AM-GM witness", secs(30), Box::new(amgm_reeve)),
        ("SOS round trip", secs(120), Box::new(sos_round_trip)),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let (out, took) = timed(limit, run);
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} [{verdict}] {name}: {} ({:.1}s)", i + 1, out.detail, took.as_secs_f64());
        if !out.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
