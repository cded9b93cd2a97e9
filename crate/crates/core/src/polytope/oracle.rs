//! Slow reference computations that avoid the facet description entirely.
//!
//! Membership in `kQ` is decided by Carathéodory: a point lies in `kQ` iff it
//! lies in `k` times some full-dimensional simplex spanned by vertices.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{HStar, LatticePolytope, PolytopeError};
use crate::numerics::{common_denominator, Rational, RationalMatrix};

/// Simplices tried before giving up.
pub const MAX_SIMPLICES: usize = 50_000;
/// Box points scanned before giving up.
pub const MAX_BOX_POINTS: u64 = 20_000_000;

struct Simplex {
    apex: Vec<i64>,
    // integer barycentric map scaled by `den`
    map: Vec<Vec<i128>>,
    den: i128,
}

impl Simplex {
    fn contains(&self, x: &[i64], k: i64) -> bool {
        let shifted: Vec<i128> = x.iter().zip(&self.apex).map(|(a, v)| (*a - v * k) as i128).collect();
        let mut total = 0i128;
        for row in &self.map {
            let t: i128 = row.iter().zip(&shifted).map(|(a, b)| a * b).sum();
            if t < 0 {
                return false;
            }
            total += t;
        }
        total <= self.den * k as i128
    }
}

pub struct BruteCounter {
    dim: usize,
    vertices: Vec<Vec<i64>>,
    simplices: Vec<Simplex>,
}

impl BruteCounter {
    pub fn new(q: &LatticePolytope) -> Result<Self, PolytopeError> {
        let full = q.to_full_dimensional();
        let dim = full.dim();
        let vertices: Vec<Vec<i64>> = full.vertices().iter().map(|v| v.0.clone()).collect();
        let mut simplices = Vec::new();
        let mut subset: Vec<usize> = (0..=dim).collect();
        if vertices.len() < dim + 1 {
            return Err(PolytopeError::InvalidArgument("too few vertices".into()));
        }
        loop {
            if let Some(s) = simplex(&vertices, &subset) {
                simplices.push(s);
                if simplices.len() > MAX_SIMPLICES {
                    return Err(PolytopeError::InvalidArgument("too many vertices for the oracle".into()));
                }
            }
            if !next_subset(&mut subset, vertices.len()) {
                break;
            }
        }
        Ok(BruteCounter { dim, vertices, simplices })
    }

    fn bounds(&self, k: i64) -> Result<(Vec<i64>, Vec<i64>), PolytopeError> {
        let lo: Vec<i64> = (0..self.dim).map(|i| self.vertices.iter().map(|v| v[i] * k).min().unwrap()).collect();
        let hi: Vec<i64> = (0..self.dim).map(|i| self.vertices.iter().map(|v| v[i] * k).max().unwrap()).collect();
        let size = lo.iter().zip(&hi).try_fold(1u64, |acc, (a, b)| acc.checked_mul((b - a + 1) as u64));
        if size.is_none_or(|s| s > MAX_BOX_POINTS) {
            return Err(PolytopeError::InvalidArgument("bounding box too large for the oracle".into()));
        }
        Ok((lo, hi))
    }

    pub fn points(&self, k: u32) -> Result<Vec<Vec<i64>>, PolytopeError> {
        let k = k as i64;
        if self.dim == 0 {
            return Ok(vec![self.vertices[0].iter().map(|v| v * k).collect()]);
        }
        let (lo, hi) = self.bounds(k)?;
        let mut out = Vec::new();
        let mut x = lo.clone();
        loop {
            if self.simplices.iter().any(|s| s.contains(&x, k)) {
                out.push(x.clone());
            }
            let mut i = 0;
            loop {
                if i == self.dim {
                    return Ok(out);
                }
                if x[i] < hi[i] {
                    x[i] += 1;
                    break;
                }
                x[i] = lo[i];
                i += 1;
            }
        }
    }
}

fn next_subset(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn simplex(vertices: &[Vec<i64>], subset: &[usize]) -> Option<Simplex> {
    let apex = vertices[subset[0]].clone();
    let dim = apex.len();
    let rows: Vec<Vec<Rational>> = (0..dim)
        .map(|r| {
            subset[1..]
                .iter()
                .map(|&j| Rational::from_integer(BigInt::from(vertices[j][r] - apex[r])))
                .collect()
        })
        .collect();
    let a = RationalMatrix::from_rows(&rows).ok()?;
    if dim > 0 && a.determinant().is_zero() {
        return None;
    }
    let mut inverse_cols = Vec::with_capacity(dim);
    for j in 0..dim {
        let e: Vec<Rational> = (0..dim).map(|i| Rational::from_integer(BigInt::from(i64::from(i == j)))).collect();
        inverse_cols.push(a.solve(&e)?);
    }
    let all: Vec<Rational> = inverse_cols.iter().flatten().cloned().collect();
    let den = common_denominator(&all);
    let scaled = |r: &Rational| (r * Rational::from_integer(den.clone())).to_integer().to_i128();
    let map = (0..dim)
        .map(|i| (0..dim).map(|j| scaled(&inverse_cols[j][i])).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()?;
    Some(Simplex { apex, map, den: den.abs().to_i128()? })
}

/// h* from Carathéodory point counts.
pub fn brute_h_star(q: &LatticePolytope) -> Result<HStar, PolytopeError> {
    let counter = BruteCounter::new(q)?;
    let m = counter.dim;
    if m > 0 {
        counter.bounds(m as i64)?;
    }
    let counts = (0..=m as u32).map(|k| Ok(counter.points(k)?.len() as i128)).collect::<Result<Vec<_>, PolytopeError>>()?;
    let mut coefficients = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let mut v = 0i128;
        let mut binom = 1i128;
        for i in 0..=j {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            v += sign * binom * counts[j - i];
            binom = binom * (m as i128 + 1 - i as i128) / (i as i128 + 1);
        }
        coefficients.push(u64::try_from(v).map_err(|_| PolytopeError::InvalidArgument("negative h* coefficient".into()))?);
    }
    Ok(HStar { coefficients })
}

/// Whether every point of `kQ` is a sum of `k` points of `Q`, by explicit sumsets.
pub fn brute_is_k_normal(q: &LatticePolytope, k: u32) -> Result<bool, PolytopeError> {
    let counter = BruteCounter::new(q)?;
    if counter.dim > 0 {
        counter.bounds(k as i64)?;
    }
    let base = counter.points(1)?;
    let mut reached: HashSet<Vec<i64>> = base.iter().cloned().collect();
    for _ in 1..k {
        let mut next = HashSet::with_capacity(reached.len() * 2);
        for s in &reached {
            for p in &base {
                next.insert(s.iter().zip(p).map(|(a, b)| a + b).collect::<Vec<i64>>());
            }
        }
        reached = next;
    }
    let target = counter.points(k)?;
    Ok(target.len() == reached.len() && target.iter().all(|p| reached.contains(p)))
}

/// Normality checked for every `2 <= k <= dim`, one step past the needed range.
pub fn brute_is_normal(q: &LatticePolytope) -> Result<bool, PolytopeError> {
    for k in 2..=q.dim().max(1) as u32 {
        if !brute_is_k_normal(q, k)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_on_standard_shapes() {
        for q in [
            LatticePolytope::dilated_simplex(2, 2),
            LatticePolytope::reeve(3).unwrap(),
            LatticePolytope::higashitani(5, 2).unwrap(),
            LatticePolytope::from_vertices(&[vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2]]).unwrap(),
        ] {
            assert_eq!(brute_h_star(&q).unwrap(), super::super::h_star(&q));
        }
    }

    #[test]
    fn normality_agrees() {
        for q in [LatticePolytope::reeve(3).unwrap(), LatticePolytope::dilated_simplex(2, 2), LatticePolytope::segment(4)] {
            assert_eq!(brute_is_normal(&q).unwrap(), super::super::is_normal(&q));
        }
        assert!(!brute_is_k_normal(&LatticePolytope::reeve(3).unwrap(), 2).unwrap());
    }
}
