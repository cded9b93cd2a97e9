//! Ehrhart counts, h*-polynomials, k-normality, polytope degree and
//! normalized volume.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{LatticePoint, LatticePolytope};

/// Coefficients `h*_0, ..., h*_m` of the h*-polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HStar {
    pub coefficients: Vec<u64>,
}

impl HStar {
    pub fn degree(&self) -> usize {
        self.coefficients.iter().rposition(|&c| c != 0).unwrap_or(0)
    }

    pub fn get(&self, j: usize) -> u64 {
        self.coefficients.get(j).copied().unwrap_or(0)
    }

    pub fn sum(&self) -> u64 {
        self.coefficients.iter().sum()
    }
}

/// Outcome of a k-normality test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normality {
    pub normal: bool,
    pub counterexample: Option<LatticePoint>,
}

fn binomial(n: i128, k: i128) -> i128 {
    if k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: i128 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// `h*_j = sum_{i<=j} (-1)^i C(m+1, i) L(j - i)` with `L(k) = |kQ ∩ M|`.
pub fn h_star(q: &LatticePolytope) -> HStar {
    let m = q.dim();
    let counts: Vec<i128> = (0..=m as u32)
        .into_par_iter()
        .map(|k| q.count_lattice_points(k) as i128)
        .collect();
    let coefficients = (0..=m)
        .map(|j| {
            let v: i128 = (0..=j)
                .map(|i| {
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    sign * binomial(m as i128 + 1, i as i128) * counts[j - i]
                })
                .sum();
            u64::try_from(v).expect("h* coefficients are nonnegative")
        })
        .collect();
    HStar { coefficients }
}

/// Smallest `j` such that `kQ` has no interior lattice point for `1 <= k <= m - j`.
pub fn polytope_degree(q: &LatticePolytope) -> usize {
    let m = q.dim();
    (1..=m)
        .find(|&k| q.count_interior_points(k as u32) > 0)
        .map_or(0, |k| m + 1 - k)
}

/// Whether every lattice point of `kQ` is a sum of `k` lattice points of `Q`.
/// On failure the lexicographically smallest unreachable point is returned.
pub fn is_k_normal(q: &LatticePolytope, k: u32) -> Normality {
    assert!(k >= 1, "k-normality needs k >= 1");
    let base = q.local_lattice_points(1);
    let mut reached: HashSet<Vec<i64>> = base.iter().cloned().collect();
    for _ in 1..k {
        reached = reached
            .par_iter()
            .flat_map_iter(|s| {
                base.iter()
                    .map(move |p| s.iter().zip(p).map(|(a, b)| a + b).collect::<Vec<i64>>())
            })
            .collect();
    }
    let target = q.local_lattice_points(k);
    if reached.len() == target.len() {
        return Normality {
            normal: true,
            counterexample: None,
        };
    }
    let counterexample = target
        .iter()
        .filter(|p| !reached.contains(*p))
        .map(|p| q.local_to_ambient(p, k))
        .min();
    Normality {
        normal: counterexample.is_none(),
        counterexample,
    }
}

/// Normality. Since `(kQ ∩ M) + (Q ∩ M) = (k+1)Q ∩ M` for `k >= m - 1`, it
/// suffices to test `2 <= k <= m - 1`.
pub fn is_normal(q: &LatticePolytope) -> bool {
    let m = q.dim() as u32;
    (2..m).all(|k| is_k_normal(q, k).normal)
}

/// `m! vol(Q)` measured in the affine lattice of `Q`, by summing
/// lattice distance times normalized volume over the facets avoiding a vertex.
pub fn normalized_volume(q: &LatticePolytope) -> BigInt {
    let dim = q.dim();
    if dim == 0 {
        return BigInt::one();
    }
    let verts = q.local_vertices();
    if dim == 1 {
        let lo = verts.iter().map(|v| v[0]).min().expect("nonempty");
        let hi = verts.iter().map(|v| v[0]).max().expect("nonempty");
        return BigInt::from(hi - lo);
    }
    let apex = &verts[0];
    let mut total = BigInt::zero();
    for f in q.local_facets() {
        let dist = f.offset as i128 - f.value(apex);
        if dist == 0 {
            continue;
        }
        let face: Vec<LatticePoint> = verts
            .iter()
            .filter(|v| f.is_tight(v))
            .map(|v| LatticePoint(v.clone()))
            .collect();
        let facet = LatticePolytope::new(dim, face).expect("facet vertices are valid");
        total += BigInt::from(dist) * normalized_volume(&facet);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_and_twice_triangle() {
        assert_eq!(h_star(&LatticePolytope::simplex(3)).coefficients, vec![1, 0, 0, 0]);
        assert_eq!(h_star(&LatticePolytope::dilated_simplex(2, 2)).coefficients, vec![1, 3, 0]);
        assert_eq!(h_star(&LatticePolytope::dilated_simplex(2, 3)).coefficients, vec![1, 7, 1]);
    }

    #[test]
    fn higashitani_h_star() {
        for k in 1..=3 {
            let q = LatticePolytope::higashitani(5, k).unwrap();
            assert_eq!(h_star(&q).coefficients, vec![1, 0, 0, k as u64, 0, 0]);
            assert_eq!(normalized_volume(&q), BigInt::from(k + 1));
        }
    }

    #[test]
    fn degrees() {
        assert_eq!(polytope_degree(&LatticePolytope::simplex(3)), 0);
        assert_eq!(polytope_degree(&LatticePolytope::dilated_simplex(2, 2)), 1);
        assert_eq!(polytope_degree(&LatticePolytope::segment(3)), 1);
        assert_eq!(polytope_degree(&LatticePolytope::dilated_simplex(2, 3)), 2);
    }

    #[test]
    fn reeve_is_not_two_normal() {
        let q = LatticePolytope::reeve(5).unwrap();
        let n = is_k_normal(&q, 2);
        assert!(!n.normal);
        assert_eq!(n.counterexample, Some(LatticePoint(vec![1, 1, 1])));
        assert!(is_k_normal(&LatticePolytope::simplex(3), 2).normal);
        assert!(is_normal(&LatticePolytope::dilated_simplex(2, 3)));
    }

    #[test]
    fn volumes() {
        assert_eq!(normalized_volume(&LatticePolytope::dilated_simplex(3, 2)), BigInt::from(8));
        let square = LatticePolytope::product(&[LatticePolytope::segment(1), LatticePolytope::segment(1)]);
        assert_eq!(normalized_volume(&square), BigInt::from(2));
        assert_eq!(normalized_volume(&LatticePolytope::reeve(5).unwrap()), BigInt::from(5));
    }
}
