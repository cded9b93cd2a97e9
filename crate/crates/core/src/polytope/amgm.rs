//! Sparse Laurent polynomials and the weighted AM-GM witness for
//! polytopes that fail 2-normality.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::hull::for_each_subset;
use super::{is_k_normal, LatticePoint, LatticePolytope, PolytopeError};
use crate::numerics::{rat_to_f64, Rational, RationalMatrix};

/// A Laurent polynomial `sum c_u z^u` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SparseJson", into = "SparseJson")]
pub struct SparsePolynomial {
    terms: BTreeMap<LatticePoint, Rational>,
}

/// One term of the JSON form; the coefficient is `num / den`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseTerm {
    pub exp: Vec<i64>,
    pub num: String,
    pub den: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SparseJson {
    pub terms: Vec<SparseTerm>,
}

impl TryFrom<SparseJson> for SparsePolynomial {
    type Error = PolytopeError;
    fn try_from(value: SparseJson) -> Result<Self, Self::Error> {
        let mut terms = Vec::with_capacity(value.terms.len());
        let mut rank = None;
        for t in value.terms {
            let parse = |s: &str| {
                s.trim()
                    .parse::<BigInt>()
                    .map_err(|_| PolytopeError::InvalidArgument(format!("not an integer: {s:?}")))
            };
            let num = parse(&t.num)?;
            let den = parse(&t.den)?;
            if den.is_zero() {
                return Err(PolytopeError::InvalidArgument("zero denominator".into()));
            }
            match rank {
                None => rank = Some(t.exp.len()),
                Some(r) if r != t.exp.len() => {
                    return Err(PolytopeError::DimensionMismatch {
                        expected: r,
                        found: t.exp.len(),
                    })
                }
                _ => {}
            }
            terms.push((LatticePoint(t.exp), Rational::new(num, den)));
        }
        Ok(SparsePolynomial::from_terms(terms))
    }
}

impl From<SparsePolynomial> for SparseJson {
    fn from(p: SparsePolynomial) -> Self {
        SparseJson {
            terms: p
                .terms
                .into_iter()
                .map(|(e, c)| SparseTerm {
                    exp: e.0,
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        }
    }
}

impl SparsePolynomial {
    /// Sums repeated exponents and drops zero coefficients.
    pub fn from_terms(terms: impl IntoIterator<Item = (LatticePoint, Rational)>) -> Self {
        let mut map: BTreeMap<LatticePoint, Rational> = BTreeMap::new();
        for (e, c) in terms {
            *map.entry(e).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Self { terms: map }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LatticePoint, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, u: &LatticePoint) -> Rational {
        self.terms.get(u).cloned().unwrap_or_else(Rational::zero)
    }

    /// Value at a point of the real torus (all coordinates nonzero).
    pub fn eval(&self, z: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mono: f64 = e.0.iter().zip(z).map(|(&a, &x)| x.powi(a as i32)).product();
                rat_to_f64(c) * mono
            })
            .sum()
    }

    /// `sum |c_u z^u|`, the natural scale for relative error bounds.
    pub fn abs_eval(&self, z: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mono: f64 = e.0.iter().zip(z).map(|(&a, &x)| x.abs().powi(a as i32)).product();
                rat_to_f64(c).abs() * mono
            })
            .sum()
    }
}

fn is_nonneg(r: &Rational) -> bool {
    !r.is_negative()
}

/// Weights `c` with `u = sum c_i w_i`, `sum c_i = 1`, `c >= 0`, supported on
/// an affinely independent subset of `points` of smallest size; the first
/// such subset in lexicographic order is used.
fn sparsest_convex_combination(points: &[Vec<i64>], u: &[i64]) -> Option<Vec<(usize, Rational)>> {
    let dim = u.len();
    for size in 1..=(dim + 1).min(points.len()) {
        let mut found = None;
        for_each_subset(points.len(), size, |subset| {
            if found.is_some() {
                return;
            }
            // rows: coordinates plus the affine row of ones; columns: chosen points
            let mut rows: Vec<Vec<i64>> = (0..dim).map(|r| subset.iter().map(|&i| points[i][r]).collect()).collect();
            rows.push(vec![1; size]);
            let a = RationalMatrix::from_int_rows(&rows).expect("nonempty");
            if a.rank() < size {
                return;
            }
            let mut rhs: Vec<Rational> = u.iter().map(|&x| Rational::from_integer(x.into())).collect();
            rhs.push(Rational::one());
            if let Some(c) = a.solve(&rhs) {
                if c.iter().all(is_nonneg) {
                    found = Some(subset.iter().copied().zip(c).filter(|(_, c)| !c.is_zero()).collect());
                }
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// For a polytope that is not 2-normal, the nonnegative polynomial
/// `sum r_i z^{2 v_i} - (sum r_i) z^u` where `u ∈ 2Q` is not a sum of two
/// lattice points of `Q`. Returns `None` when `Q` is 2-normal.
pub fn amgm_witness(q: &LatticePolytope) -> Option<SparsePolynomial> {
    let normality = is_k_normal(q, 2);
    let u = normality.counterexample?;
    let doubled: Vec<Vec<i64>> = q.vertices().iter().map(|v| v.scale(2).0).collect();
    let weights = sparsest_convex_combination(&doubled, &u.0)
        .expect("a lattice point of 2Q is a convex combination of the doubled vertices");
    let lcm = weights
        .iter()
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let mut r: Vec<(usize, BigInt)> = weights
        .iter()
        .map(|(i, c)| (*i, (c * Rational::from_integer(lcm.clone())).to_integer()))
        .collect();
    let g = r.iter().fold(BigInt::zero(), |acc, (_, x)| acc.gcd(x));
    for (_, x) in r.iter_mut() {
        *x /= &g;
    }
    let total: BigInt = r.iter().map(|(_, x)| x.clone()).sum();
    let mut terms: Vec<(LatticePoint, Rational)> = r
        .into_iter()
        .map(|(i, x)| (LatticePoint(doubled[i].clone()), Rational::from_integer(x)))
        .collect();
    terms.push((u, Rational::from_integer(-total)));
    Some(SparsePolynomial::from_terms(terms))
}

/// An exponent `u` where `f` has a negative coefficient although every
/// splitting `u = a + b` with `a, b ∈ Q ∩ M` is diagonal (`a = b`) or none
/// exists. Any Gram representation with supports in `Q` would put a
/// nonnegative number there, so `f` is then not a sum of squares of
/// polynomials supported in `Q`.
pub fn diagonal_gram_obstruction(f: &SparsePolynomial, q: &LatticePolytope) -> Option<LatticePoint> {
    let pts = q.lattice_points(1);
    let set: HashSet<&LatticePoint> = pts.iter().collect();
    f.terms()
        .filter(|(_, c)| c.is_negative())
        .map(|(u, _)| u)
        .find(|u| {
            pts.iter().all(|a| {
                let b = u.sub(a);
                !set.contains(&b) || b == *a
            })
        })
        .cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rat;

    #[test]
    fn reeve_witness() {
        let q = LatticePolytope::reeve(5).unwrap();
        let f = amgm_witness(&q).unwrap();
        assert_eq!(f.len(), 5);
        let u = LatticePoint(vec![1, 1, 1]);
        assert_eq!(f.coefficient(&u), rat(-10));
        assert_eq!(f.coefficient(&LatticePoint(vec![2, 0, 0])), rat(4));
        assert_eq!(f.coefficient(&LatticePoint(vec![2, 2, 10])), rat(1));
        assert_eq!(diagonal_gram_obstruction(&f, &q), Some(u));
        assert!(f.eval(&[1.0, 1.0, 1.0]).abs() < 1e-12);
    }

    #[test]
    fn normal_polytopes_have_no_witness() {
        assert!(amgm_witness(&LatticePolytope::dilated_simplex(2, 2)).is_none());
        assert!(amgm_witness(&LatticePolytope::segment(4)).is_none());
    }

    #[test]
    fn motzkin_obstruction() {
        let q = LatticePolytope::from_vertices(&[vec![0, 0], vec![2, 1], vec![1, 2]]).unwrap();
        // 1 + x^4 y^2 + x^2 y^4 - 3 x^2 y^2
        let f = SparsePolynomial::from_terms(vec![
            (LatticePoint(vec![0, 0]), rat(1)),
            (LatticePoint(vec![4, 2]), rat(1)),
            (LatticePoint(vec![2, 4]), rat(1)),
            (LatticePoint(vec![2, 2]), rat(-3)),
        ]);
        assert_eq!(diagonal_gram_obstruction(&f, &q), Some(LatticePoint(vec![2, 2])));
    }

    #[test]
    fn json_form() {
        let f = SparsePolynomial::from_terms(vec![
            (LatticePoint(vec![1, 0]), Rational::new(BigInt::from(-3), BigInt::from(6))),
            (LatticePoint(vec![0, 0]), rat(0)),
        ]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"terms":[{"exp":[1,0],"num":"-1","den":"2"}]}"#);
        assert_eq!(serde_json::from_str::<SparsePolynomial>(&s).unwrap(), f);
    }
}
