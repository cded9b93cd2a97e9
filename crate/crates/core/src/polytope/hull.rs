//! Facet descriptions of full-dimensional lattice polytopes and lattice-point
//! enumeration through the chain of coordinate projections.

use std::collections::BTreeSet;

use rayon::prelude::*;

/// `normal · x <= offset`, with a primitive integer normal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
}

impl Facet {
    #[inline]
    pub fn value(&self, x: &[i64]) -> i128 {
        self.normal
            .iter()
            .zip(x)
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum()
    }

    #[inline]
    pub fn contains_dilate(&self, x: &[i64], k: i64) -> bool {
        self.value(x) <= self.offset as i128 * k as i128
    }

    #[inline]
    pub fn strictly_inside_dilate(&self, x: &[i64], k: i64) -> bool {
        self.value(x) < self.offset as i128 * k as i128
    }

    #[inline]
    pub fn is_tight(&self, x: &[i64]) -> bool {
        self.value(x) == self.offset as i128
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Fraction-free determinant (Bareiss) of a small square matrix.
fn bareiss_det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| m[i][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Primitive normal of the hyperplane through `dim` points of `Z^dim`, or `None`
/// if the points are affinely dependent.
fn hyperplane_normal(points: &[&[i64]], dim: usize) -> Option<Vec<i64>> {
    let base = points[0];
    let diffs: Vec<Vec<i128>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(&a, &b)| a as i128 - b as i128).collect())
        .collect();
    let mut normal = Vec::with_capacity(dim);
    for skip in 0..dim {
        let minor: Vec<Vec<i128>> = diffs
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(c, _)| c != skip).map(|(_, &v)| v).collect())
            .collect();
        let d = bareiss_det(minor);
        normal.push(if skip % 2 == 0 { d } else { -d });
    }
    let g = normal.iter().fold(0i128, |acc, &v| gcd(acc, v));
    if g == 0 {
        return None;
    }
    Some(normal.into_iter().map(|v| i64::try_from(v / g).expect("facet normal overflow")).collect())
}

/// Visits every `size`-subset of `0..n` in lexicographic order.
pub(crate) fn for_each_subset(n: usize, size: usize, mut f: impl FnMut(&[usize])) {
    if size > n {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        f(&idx);
        let mut i = size;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - size {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Facets of `conv(points)`; the points must affinely span `Z^dim`.
pub(crate) fn hull_facets(points: &[Vec<i64>], dim: usize) -> Vec<Facet> {
    if dim == 0 {
        return Vec::new();
    }
    if dim == 1 {
        let lo = points.iter().map(|p| p[0]).min().expect("nonempty");
        let hi = points.iter().map(|p| p[0]).max().expect("nonempty");
        return vec![
            Facet { normal: vec![-1], offset: -lo },
            Facet { normal: vec![1], offset: hi },
        ];
    }
    let mut found = BTreeSet::new();
    for_each_subset(points.len(), dim, |subset| {
        let pts: Vec<&[i64]> = subset.iter().map(|&i| points[i].as_slice()).collect();
        let Some(normal) = hyperplane_normal(&pts, dim) else {
            return;
        };
        let facet = Facet {
            offset: 0,
            normal: normal.clone(),
        };
        let b = facet.value(pts[0]);
        let (mut below, mut above) = (false, false);
        for p in points {
            let v = facet.value(p);
            below |= v < b;
            above |= v > b;
            if below && above {
                return;
            }
        }
        let offset = i64::try_from(b).expect("facet offset overflow");
        if above {
            found.insert(Facet {
                normal: normal.iter().map(|v| -v).collect(),
                offset: -offset,
            });
        } else {
            found.insert(Facet { normal, offset });
        }
    });
    found.into_iter().collect()
}

/// Indices of the points of `points` that are vertices of their convex hull.
pub(crate) fn vertex_indices(points: &[Vec<i64>], facets: &[Facet], dim: usize) -> Vec<usize> {
    use crate::numerics::RationalMatrix;
    if dim == 0 {
        return vec![0];
    }
    (0..points.len())
        .filter(|&i| {
            let tight: Vec<Vec<i64>> = facets
                .iter()
                .filter(|f| f.is_tight(&points[i]))
                .map(|f| f.normal.clone())
                .collect();
            tight.len() >= dim
                && RationalMatrix::from_int_rows(&tight)
                    .map(|m| m.rank() == dim)
                    .unwrap_or(false)
        })
        .collect()
}

/// Lattice-point enumerator for the dilates of a full-dimensional polytope.
/// `levels[i]` holds the facets of the projection onto the first `i + 1` coordinates.
#[derive(Debug, Clone)]
pub(crate) struct Enumerator {
    dim: usize,
    levels: Vec<Vec<Facet>>,
}

impl Enumerator {
    pub fn new(vertices: &[Vec<i64>], dim: usize) -> Self {
        let mut levels = Vec::with_capacity(dim);
        for i in 1..=dim {
            let projected: BTreeSet<Vec<i64>> = vertices.iter().map(|v| v[..i].to_vec()).collect();
            let projected: Vec<Vec<i64>> = projected.into_iter().collect();
            let facets = hull_facets(&projected, i);
            let verts = vertex_indices(&projected, &facets, i);
            let reduced: Vec<Vec<i64>> = verts.into_iter().map(|j| projected[j].clone()).collect();
            // re-run on vertices only when the projection collapsed many points
            let facets = if reduced.len() < projected.len() {
                hull_facets(&reduced, i)
            } else {
                facets
            };
            levels.push(facets);
        }
        Self { dim, levels }
    }

    fn bounds(&self, prefix: &[i64], k: i64) -> Option<(i64, i64)> {
        let level = &self.levels[prefix.len()];
        let i = prefix.len();
        let (mut lo, mut hi) = (i128::MIN, i128::MAX);
        for f in level {
            let a = f.normal[i] as i128;
            if a == 0 {
                continue;
            }
            let partial: i128 = f.normal[..i]
                .iter()
                .zip(prefix)
                .map(|(&c, &x)| c as i128 * x as i128)
                .sum();
            let rhs = f.offset as i128 * k as i128 - partial;
            if a > 0 {
                hi = hi.min(rhs.div_euclid(a));
            } else {
                // a x <= rhs with a < 0  <=>  x >= ceil(rhs / a)
                lo = lo.max(ceil_div(rhs, a));
            }
        }
        if lo > hi {
            return None;
        }
        Some((lo as i64, hi as i64))
    }

    fn walk(&self, prefix: &mut Vec<i64>, k: i64, out: &mut dyn FnMut(&[i64])) {
        if prefix.len() == self.dim {
            out(prefix);
            return;
        }
        let Some((lo, hi)) = self.bounds(prefix, k) else {
            return;
        };
        for x in lo..=hi {
            prefix.push(x);
            self.walk(prefix, k, out);
            prefix.pop();
        }
    }

    /// Lattice points of `k` times the polytope, in lexicographic order.
    pub fn points(&self, k: i64) -> Vec<Vec<i64>> {
        if self.dim == 0 {
            return vec![Vec::new()];
        }
        let Some((lo, hi)) = self.bounds(&[], k) else {
            return Vec::new();
        };
        (lo..=hi)
            .into_par_iter()
            .map(|x| {
                let mut acc = Vec::new();
                let mut prefix = vec![x];
                self.walk(&mut prefix, k, &mut |p| acc.push(p.to_vec()));
                acc
            })
            .flatten()
            .collect()
    }

    pub fn count(&self, k: i64) -> u64 {
        if self.dim == 0 {
            return 1;
        }
        let Some((lo, hi)) = self.bounds(&[], k) else {
            return 0;
        };
        (lo..=hi)
            .into_par_iter()
            .map(|x| {
                let mut n = 0u64;
                let mut prefix = vec![x];
                self.walk(&mut prefix, k, &mut |_| n += 1);
                n
            })
            .sum()
    }

    /// Number of lattice points strictly inside `k` times the polytope.
    pub fn count_interior(&self, k: i64) -> u64 {
        if self.dim == 0 {
            return 1;
        }
        let facets = &self.levels[self.dim - 1];
        let Some((lo, hi)) = self.bounds(&[], k) else {
            return 0;
        };
        (lo..=hi)
            .into_par_iter()
            .map(|x| {
                let mut n = 0u64;
                let mut prefix = vec![x];
                self.walk(&mut prefix, k, &mut |p| {
                    if facets.iter().all(|f| f.strictly_inside_dilate(p, k)) {
                        n += 1;
                    }
                });
                n
            })
            .sum()
    }
}

#[inline]
fn ceil_div(a: i128, b: i128) -> i128 {
    let q = a.div_euclid(b);
    if a.rem_euclid(b) == 0 {
        q
    } else if b > 0 {
        q + 1
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_in_order() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(
            seen,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        let mut count = 0;
        for_each_subset(3, 0, |_| count += 1);
        assert_eq!(count, 1);
    }

    #[test]
    fn square_facets() {
        let pts = vec![vec![0, 0], vec![2, 0], vec![0, 2], vec![2, 2], vec![1, 1]];
        let facets = hull_facets(&pts, 2);
        assert_eq!(facets.len(), 4);
        let verts = vertex_indices(&pts, &facets, 2);
        assert_eq!(verts, vec![0, 1, 2, 3]);
    }

    #[test]
    fn triangle_counts() {
        let e = Enumerator::new(&[vec![0, 0], vec![1, 0], vec![0, 1]], 2);
        assert_eq!(e.count(0), 1);
        assert_eq!(e.count(1), 3);
        assert_eq!(e.count(2), 6);
        assert_eq!(e.count(3), 10);
        assert_eq!(e.count_interior(3), 1);
        assert_eq!(e.points(1), vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn ceil_division_signs() {
        assert_eq!(ceil_div(7, 2), 4);
        assert_eq!(ceil_div(-7, 2), -3);
        assert_eq!(ceil_div(7, -2), -3);
        assert_eq!(ceil_div(-7, -2), 4);
        assert_eq!(ceil_div(6, -3), -2);
    }
}
