#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sosdeg::polytope::{is_k_normal, LatticePoint, LatticePolytope};

/// Random full-dimensional lattice polytope of dimension `m` with
/// coordinates in `0..=max_coord`.
pub fn random_polytope(rng: &mut ChaCha8Rng, m: usize, max_coord: i64) -> LatticePolytope {
    loop {
        let count = rng.random_range(m + 1..=m + 4);
        let pts: Vec<LatticePoint> = (0..count)
            .map(|_| LatticePoint((0..m).map(|_| rng.random_range(0..=max_coord)).collect()))
            .collect();
        let q = LatticePolytope::new(m, pts).unwrap();
        if q.dim() == m {
            return q;
        }
    }
}

/// Deterministic corpus of random polytopes of dimension 1 to 3.
pub fn corpus(seed: u64, size: usize, max_coord: i64, require_two_normal: bool) -> Vec<LatticePolytope> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(size);
    while out.len() < size {
        let m = rng.random_range(1..=3);
        let q = random_polytope(&mut rng, m, max_coord);
        if require_two_normal && !is_k_normal(&q, 2).normal {
            continue;
        }
        out.push(q);
    }
    out
}

fn det_i128(mut m: Vec<Vec<i128>>) -> i128 {
    // exact cofactor expansion, fine for the tiny sizes used here
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0];
    }
    let first = m.remove(0);
    let mut total = 0;
    for (j, a) in first.iter().enumerate() {
        if *a == 0 {
            continue;
        }
        let minor: Vec<Vec<i128>> = m
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect())
            .collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        total += sign * a * det_i128(minor);
    }
    total
}

fn affine_rank(points: &[Vec<i64>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let base = &points[0];
    let rows: Vec<Vec<i64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    sosdeg::numerics::RationalMatrix::from_int_rows(&rows).unwrap().rank()
}

/// Facets of a full-dimensional polytope as vertex sets, found by brute force
/// over hyperplanes through `m` vertices.
fn brute_facets(verts: &[Vec<i64>], m: usize) -> Vec<Vec<usize>> {
    let mut facets: Vec<Vec<usize>> = Vec::new();
    let n = verts.len();
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        let chosen: Vec<Vec<i64>> = idx.iter().map(|&i| verts[i].clone()).collect();
        if affine_rank(&chosen) == m - 1 {
            // normal via cofactors of the difference matrix
            let diffs: Vec<Vec<i128>> = chosen[1..]
                .iter()
                .map(|p| p.iter().zip(&chosen[0]).map(|(a, b)| (*a - *b) as i128).collect())
                .collect();
            let normal: Vec<i128> = (0..m)
                .map(|skip| {
                    let minor: Vec<Vec<i128>> = diffs
                        .iter()
                        .map(|r| r.iter().enumerate().filter(|&(c, _)| c != skip).map(|(_, &v)| v).collect())
                        .collect();
                    let s = if skip % 2 == 0 { 1 } else { -1 };
                    s * det_i128(minor)
                })
                .collect();
            let val = |p: &Vec<i64>| -> i128 { normal.iter().zip(p).map(|(a, &b)| a * b as i128).sum() };
            let b = val(&chosen[0]);
            let signs: Vec<i128> = verts.iter().map(|p| (val(p) - b).signum()).collect();
            if !(signs.contains(&1) && signs.contains(&-1)) {
                let on: Vec<usize> = (0..n).filter(|&i| signs[i] == 0).collect();
                if !facets.contains(&on) {
                    facets.push(on);
                }
            }
        }
        // next m-subset
        let mut i = m;
        loop {
            if i == 0 {
                return facets;
            }
            i -= 1;
            if idx[i] != i + n - m {
                break;
            }
            if i == 0 {
                return facets;
            }
        }
        idx[i] += 1;
        for j in i + 1..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `m! vol(Q)` of a full-dimensional polytope through an explicit pulling
/// triangulation: every simplex contributes `|det|` of its edge vectors.
pub fn triangulated_volume(q: &LatticePolytope) -> i128 {
    let m = q.ambient_rank();
    assert_eq!(q.dim(), m);
    let verts: Vec<Vec<i64>> = q.vertices().iter().map(|v| v.0.clone()).collect();
    if m == 0 {
        return 1;
    }
    let facets = brute_facets(&verts, m);
    let mut simplices = Vec::new();
    pull(&verts, &facets, (0..verts.len()).collect(), m, &mut simplices);
    simplices
        .iter()
        .map(|s: &Vec<usize>| {
            let rows: Vec<Vec<i128>> = s[1..]
                .iter()
                .map(|&i| verts[i].iter().zip(&verts[s[0]]).map(|(a, b)| (*a - *b) as i128).collect())
                .collect();
            det_i128(rows).abs()
        })
        .sum()
}

// Triangulates the face spanned by `face` (dimension `d`) by coning its
// first vertex over the faces of dimension d-1 that avoid it.
fn pull(verts: &[Vec<i64>], facets: &[Vec<usize>], face: Vec<usize>, d: usize, out: &mut Vec<Vec<usize>>) {
    if face.len() == d + 1 {
        out.push(face);
        return;
    }
    let apex = face[0];
    let mut seen: Vec<Vec<usize>> = Vec::new();
    for f in facets {
        let sub: Vec<usize> = face.iter().copied().filter(|i| f.contains(i)).collect();
        if sub.contains(&apex) || seen.contains(&sub) {
            continue;
        }
        let pts: Vec<Vec<i64>> = sub.iter().map(|&i| verts[i].clone()).collect();
        if affine_rank(&pts) != d - 1 {
            continue;
        }
        seen.push(sub.clone());
        let mut below = Vec::new();
        pull(verts, facets, sub, d - 1, &mut below);
        for mut s in below {
            s.insert(0, apex);
            out.push(s);
        }
    }
}

/// `B B^T / k` for a Gaussian `k x k` matrix `B`.
pub fn random_psd(rng: &mut ChaCha8Rng, k: usize) -> sosdeg::numerics::SymMatrix {
    use rand_distr::{Distribution, StandardNormal};
    let b: Vec<Vec<f64>> = (0..k).map(|_| (0..k).map(|_| StandardNormal.sample(rng)).collect()).collect();
    sosdeg::numerics::SymMatrix::from_fn(k, |i, j| (0..k).map(|t| b[i][t] * b[j][t]).sum::<f64>() / k as f64)
}

/// Minimal-degree models used by the SOS suites.
pub fn minimal_degree_models() -> Vec<sosdeg::variety::VarietyModel> {
    use sosdeg::variety::{scroll_model, toric_model};
    vec![
        toric_model(&LatticePolytope::dilated_simplex(2, 2)),
        scroll_model(&[1, 2]).unwrap(),
        scroll_model(&[2, 2]).unwrap(),
        toric_model(&LatticePolytope::segment(3)),
    ]
}

/// A random form shifted by a multiple of `Σ x_i²` so that its sampled
/// minimum on the unit sphere of the cone over `X` is `margin`.
pub fn random_positive_form(
    rng: &mut ChaCha8Rng,
    model: &sosdeg::variety::VarietyModel,
    samples: &[Vec<f64>],
    margin: f64,
) -> Vec<f64> {
    use rand_distr::{Distribution, StandardNormal};
    use sosdeg::numerics::SymMatrix;
    let g: Vec<f64> = (0..model.dim_r2()).map(|_| StandardNormal.sample(rng)).collect();
    let slice = sosdeg::cones::build_gram_slice(model).unwrap();
    let u = slice.sigma(&SymMatrix::identity(model.r1_dim()));
    let min = samples.iter().map(|p| model.eval_form(&g, p)).fold(f64::INFINITY, f64::min);
    g.iter().zip(&u).map(|(a, b)| a + (margin - min) * b).collect()
}

pub fn sphere_samples(rng: &mut ChaCha8Rng, model: &sosdeg::variety::VarietyModel, count: usize) -> Vec<Vec<f64>> {
    (0..count).map(|_| model.random_real_point(rng).unwrap()).collect()
}
