//! Sublattice index, real density and the classification of polytopes with
//! vanishing quadratic h*-coefficient.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{h_star, is_k_normal, is_normal, polytope_degree, HStar, LatticePolytope};
use crate::numerics::{self, unimodular_to_first_basis_vector, RationalMatrix};

/// Index `[M : M'']` where `M''` is spanned by differences of lattice points of `Q`,
/// measured in the affine lattice of `Q`.
pub fn sublattice_index(q: &LatticePolytope) -> BigInt {
    let pts = q.local_lattice_points(1);
    let dim = q.dim();
    let base = &pts[0];
    let diffs: Vec<Vec<BigInt>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| BigInt::from(a - b)).collect())
        .collect();
    if diffs.is_empty() {
        return BigInt::from(1);
    }
    numerics::sublattice_index(&diffs, dim).expect("lattice points span the affine lattice")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Density {
    Dense,
    NotDense,
}

/// Dense exactly when the sublattice index is odd.
pub fn real_density(q: &LatticePolytope) -> Density {
    if sublattice_index(q).is_odd() {
        Density::Dense
    } else {
        Density::NotDense
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    PyramidOverTwiceSimplex,
    CayleySegments,
    ImageOfModel,
    NotMinimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PosSos {
    Equal,
    NotEqual,
}

/// Affine map `x -> matrix * x + translation` from the lattice of the model
/// polytope to the ambient lattice of `Q`, bijective on lattice points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelMap {
    pub model: LatticePolytope,
    /// `ambient_rank x m`, row-major.
    pub matrix: Vec<Vec<i64>>,
    pub translation: Vec<i64>,
    /// Segment lengths for Cayley models.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<i64>>,
}

impl ModelMap {
    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        self.matrix
            .iter()
            .zip(&self.translation)
            .map(|(row, t)| t + row.iter().zip(x).map(|(a, b)| a * b).sum::<i64>())
            .collect()
    }

    /// Exact check that the map sends the lattice points of the model onto those of `q`.
    pub fn verify(&self, q: &LatticePolytope) -> bool {
        let image: BTreeSet<Vec<i64>> = self
            .model
            .lattice_points(1)
            .iter()
            .map(|p| self.apply(&p.0))
            .collect();
        let target: BTreeSet<Vec<i64>> = q.lattice_points(1).into_iter().map(|p| p.0).collect();
        image.len() == self.model.count_lattice_points(1) as usize && image == target
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub dim: usize,
    pub h_star: HStar,
    pub h2_zero: bool,
    pub two_normal: bool,
    pub polytope_degree: usize,
    pub degree_one: bool,
    pub family: Family,
    pub model_map: Option<ModelMap>,
    pub sublattice_index: String,
    pub density: Density,
    pub density_criterion: String,
    pub pos_equals_sos: PosSos,
}

/// Largest dimension for which an explicit model map is searched for.
const RECOGNITION_MAX_DIM: usize = 4;

pub fn classify(q: &LatticePolytope) -> ClassificationReport {
    let h = h_star(q);
    let h2_zero = h.get(2) == 0;
    let two_normal = is_k_normal(q, 2).normal;
    let degree = polytope_degree(q);
    let index = sublattice_index(q);
    let density = if index.is_odd() { Density::Dense } else { Density::NotDense };
    let (family, model_map) = if !h2_zero {
        (Family::NotMinimal, None)
    } else if q.dim() <= RECOGNITION_MAX_DIM && is_normal(q) {
        match recognize(q) {
            Some((family, map)) => (family, Some(map)),
            None => (Family::ImageOfModel, None),
        }
    } else {
        (Family::ImageOfModel, None)
    };
    let pos_equals_sos = if h2_zero && density == Density::Dense {
        PosSos::Equal
    } else {
        PosSos::NotEqual
    };
    ClassificationReport {
        dim: q.dim(),
        h_star: h,
        h2_zero,
        two_normal,
        polytope_degree: degree,
        degree_one: degree <= 1,
        family,
        model_map,
        sublattice_index: index.to_string(),
        density,
        density_criterion: "index parity".into(),
        pos_equals_sos,
    }
}

fn recognize(q: &LatticePolytope) -> Option<(Family, ModelMap)> {
    if let Some(map) = recognize_pyramid(q) {
        return Some((Family::PyramidOverTwiceSimplex, map));
    }
    recognize_cayley(q).map(|map| (Family::CayleySegments, map))
}

fn det_abs(columns: &[Vec<i64>]) -> BigInt {
    let rows: Vec<Vec<i64>> = (0..columns.len()).map(|r| columns.iter().map(|c| c[r]).collect()).collect();
    let d = RationalMatrix::from_int_rows(&rows).expect("square").determinant();
    d.to_integer().magnitude().clone().into()
}

// Turns a local-chart map `c -> a c + t` into an ambient one and verifies it.
fn finish(q: &LatticePolytope, model: LatticePolytope, columns: Vec<Vec<i64>>, t: Vec<i64>, lengths: Option<Vec<i64>>) -> Option<ModelMap> {
    let (origin, basis) = q.frame_origin_and_basis();
    let rank = q.ambient_rank();
    let identity = q.is_full_dimensional();
    let to_ambient_vec = |c: &[i64]| -> Vec<i64> {
        if identity {
            return c.to_vec();
        }
        let mut x = vec![0; rank];
        for (ci, b) in c.iter().zip(&basis) {
            for (xr, br) in x.iter_mut().zip(b) {
                *xr += ci * br;
            }
        }
        x
    };
    let ambient_cols: Vec<Vec<i64>> = columns.iter().map(|c| to_ambient_vec(c)).collect();
    let mut translation = to_ambient_vec(&t);
    if !identity {
        for (x, o) in translation.iter_mut().zip(&origin) {
            *x += o;
        }
    }
    let m = columns.len();
    let matrix: Vec<Vec<i64>> = (0..rank).map(|r| (0..m).map(|j| ambient_cols[j][r]).collect()).collect();
    let map = ModelMap {
        model,
        matrix,
        translation,
        lengths,
    };
    map.verify(q).then_some(map)
}

/// Simplices `conv{a, b, c, p_3, ..., p_m}` with `(b - a)/2`, `(c - a)/2` and
/// `p_j - a` forming a lattice basis.
fn recognize_pyramid(q: &LatticePolytope) -> Option<ModelMap> {
    let m = q.dim();
    let verts = q.local_vertices();
    if m < 2 || verts.len() != m + 1 {
        return None;
    }
    for a in 0..=m {
        for b in 0..=m {
            for c in b + 1..=m {
                if b == a || c == a {
                    continue;
                }
                let half = |i: usize| -> Option<Vec<i64>> {
                    let d: Vec<i64> = verts[i].iter().zip(&verts[a]).map(|(x, y)| x - y).collect();
                    d.iter().all(|x| x % 2 == 0).then(|| d.iter().map(|x| x / 2).collect())
                };
                let (Some(hb), Some(hc)) = (half(b), half(c)) else {
                    continue;
                };
                let mut columns = vec![hb, hc];
                for (j, v) in verts.iter().enumerate() {
                    if j != a && j != b && j != c {
                        columns.push(v.iter().zip(&verts[a]).map(|(x, y)| x - y).collect());
                    }
                }
                if det_abs(&columns) != BigInt::from(1) {
                    continue;
                }
                let model = LatticePolytope::pyramid_over_twice_simplex(m).ok()?;
                if let Some(map) = finish(q, model, columns, verts[a].clone(), None) {
                    return Some(map);
                }
            }
        }
    }
    None
}

fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    let mut w: Vec<i64> = v.iter().map(|x| x / g).collect();
    if w.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        w.iter_mut().for_each(|x| *x = -*x);
    }
    w
}

/// Polytopes whose projection along an edge direction `u` is a unimodular
/// simplex; the fibres over its vertices are the segments.
fn recognize_cayley(q: &LatticePolytope) -> Option<ModelMap> {
    let m = q.dim();
    let verts = q.local_vertices();
    let pts = q.local_lattice_points(1);
    let mut directions = BTreeSet::new();
    for i in 0..verts.len() {
        for j in i + 1..verts.len() {
            let d: Vec<i64> = verts[j].iter().zip(&verts[i]).map(|(a, b)| a - b).collect();
            directions.insert(primitive(&d));
        }
    }
    for u in directions {
        let ub: Vec<BigInt> = u.iter().map(|&x| BigInt::from(x)).collect();
        let p = unimodular_to_first_basis_vector(&ub)?;
        let p: Vec<Vec<i64>> = p.iter().map(|r| r.iter().map(|x| x.to_i64().expect("small")).collect()).collect();
        let apply = |x: &[i64]| -> Vec<i64> { p.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect() };
        // fibres keyed by the projection, storing the extreme heights
        let mut fibres: std::collections::BTreeMap<Vec<i64>, (i64, i64, Vec<i64>)> = Default::default();
        for x in &pts {
            let y = apply(x);
            let key = y[1..].to_vec();
            let e = fibres.entry(key).or_insert((y[0], y[0], x.clone()));
            if y[0] < e.0 {
                e.0 = y[0];
                e.2 = x.clone();
            }
            e.1 = e.1.max(y[0]);
        }
        if fibres.len() != m {
            continue;
        }
        let keys: Vec<&Vec<i64>> = fibres.keys().collect();
        let base: Vec<Vec<i64>> = keys[1..]
            .iter()
            .map(|k| k.iter().zip(keys[0]).map(|(a, b)| a - b).collect())
            .collect();
        if m > 1 && det_abs(&base) != BigInt::from(1) {
            continue;
        }
        let entries: Vec<&(i64, i64, Vec<i64>)> = fibres.values().collect();
        let lengths: Vec<i64> = entries.iter().map(|(lo, hi, _)| hi - lo).collect();
        let t = entries[0].2.clone();
        let mut columns: Vec<Vec<i64>> = entries[1..]
            .iter()
            .map(|(_, _, low)| low.iter().zip(&t).map(|(a, b)| a - b).collect())
            .collect();
        columns.push(u.clone());
        let model = LatticePolytope::cayley_segments(&lengths).ok()?;
        if let Some(map) = finish(q, model, columns, t, Some(lengths)) {
            return Some(map);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twice_triangle_is_a_pyramid() {
        let r = classify(&LatticePolytope::dilated_simplex(2, 2));
        assert!(r.h2_zero && r.degree_one && r.two_normal);
        assert_eq!(r.family, Family::PyramidOverTwiceSimplex);
        assert_eq!(r.pos_equals_sos, PosSos::Equal);
        assert_eq!(r.density, Density::Dense);
    }

    #[test]
    fn cayley_recognised() {
        let r = classify(&LatticePolytope::cayley_segments(&[1, 2]).unwrap());
        assert_eq!(r.family, Family::CayleySegments);
        assert_eq!(r.model_map.unwrap().lengths, Some(vec![1, 2]));
        assert_eq!(r.pos_equals_sos, PosSos::Equal);
        // Cayley polytope of [0,1], [0,1], [0,2] moved by a unimodular affine map
        let q = LatticePolytope::from_vertices(&[
            vec![3, -1, 2],
            vec![3, 0, 3],
            vec![4, -1, 2],
            vec![4, 0, 3],
            vec![4, 0, 2],
            vec![4, 2, 4],
        ])
        .unwrap();
        let r = classify(&q);
        assert!(r.h2_zero);
        assert_eq!(r.family, Family::CayleySegments);
        let map = r.model_map.unwrap();
        assert!(map.verify(&q));
        let mut lengths = map.lengths.unwrap();
        lengths.sort();
        assert_eq!(lengths, vec![1, 1, 2]);
    }

    #[test]
    fn thrice_triangle_is_not_minimal() {
        let r = classify(&LatticePolytope::dilated_simplex(2, 3));
        assert!(!r.h2_zero);
        assert_eq!(r.family, Family::NotMinimal);
        assert_eq!(r.pos_equals_sos, PosSos::NotEqual);
    }

    #[test]
    fn higashitani_density() {
        let q1 = LatticePolytope::higashitani(5, 1).unwrap();
        assert_eq!(sublattice_index(&q1), BigInt::from(2));
        assert_eq!(real_density(&q1), Density::NotDense);
        let q2 = LatticePolytope::higashitani(5, 2).unwrap();
        assert_eq!(real_density(&q2), Density::Dense);
        assert_eq!(classify(&q2).family, Family::ImageOfModel);
    }

    #[test]
    fn lower_dimensional_input() {
        let q = LatticePolytope::from_vertices(&[vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2]]).unwrap();
        let r = classify(&q);
        assert_eq!(r.family, Family::PyramidOverTwiceSimplex);
        assert!(r.model_map.unwrap().verify(&q));
    }
}
