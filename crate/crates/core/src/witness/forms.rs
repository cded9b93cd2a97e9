//! Ternary forms with exact coefficients.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::numerics::{rat_to_f64, Rational};

pub type Exponent = [u32; 3];

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TernaryForm {
    terms: BTreeMap<Exponent, Rational>,
}

impl TernaryForm {
    pub fn linear(c: &[Rational; 3]) -> Self {
        let mut terms = BTreeMap::new();
        for (k, v) in c.iter().enumerate() {
            if !v.is_zero() {
                let mut e = [0; 3];
                e[k] = 1;
                terms.insert(e, v.clone());
            }
        }
        TernaryForm { terms }
    }

    pub fn one() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert([0, 0, 0], Rational::from_integer(1.into()));
        TernaryForm { terms }
    }

    pub fn from_vector(basis: &[Exponent], v: &[Rational]) -> Self {
        let terms = basis
            .iter()
            .zip(v)
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (*e, c.clone()))
            .collect();
        TernaryForm { terms }
    }

    pub fn mul(&self, other: &TernaryForm) -> TernaryForm {
        let mut terms: BTreeMap<Exponent, Rational> = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let e = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
                *terms.entry(e).or_insert_with(Rational::zero) += x * y;
            }
        }
        terms.retain(|_, v| !v.is_zero());
        TernaryForm { terms }
    }

    /// Coefficients over `basis`; panics if a term is missing from it.
    pub fn to_vector(&self, basis: &[Exponent]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); basis.len()];
        for (e, c) in &self.terms {
            let pos = basis.iter().position(|b| b == e).expect("term outside the basis");
            out[pos] = c.clone();
        }
        out
    }
}

/// `x^a y^b z^c` at an exact point.
pub fn monomial_at(e: &Exponent, p: &[Rational; 3]) -> Rational {
    let mut v = Rational::from_integer(1.into());
    for k in 0..3 {
        for _ in 0..e[k] {
            v *= &p[k];
        }
    }
    v
}

/// The partial derivative `∂/∂x_k` of `x^e` at `p`.
pub fn monomial_derivative_at(e: &Exponent, k: usize, p: &[Rational; 3]) -> Rational {
    if e[k] == 0 {
        return Rational::zero();
    }
    let mut lowered = *e;
    lowered[k] -= 1;
    monomial_at(&lowered, p) * Rational::from_integer(e[k].into())
}

/// A form prepared for fast floating-point evaluation.
#[derive(Debug, Clone)]
pub struct FloatForm {
    terms: Vec<(Exponent, f64)>,
}

impl FloatForm {
    pub fn new(basis: &[Exponent], v: &[Rational]) -> Self {
        FloatForm {
            terms: basis
                .iter()
                .zip(v)
                .filter(|(_, c)| !c.is_zero())
                .map(|(e, c)| (*e, rat_to_f64(c)))
                .collect(),
        }
    }

    pub fn eval(&self, p: &[f64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * p[0].powi(e[0] as i32) * p[1].powi(e[1] as i32) * p[2].powi(e[2] as i32))
            .sum()
    }

    /// Sum of absolute coefficients, a bound for `|f|` on the unit sphere.
    pub fn l1_norm(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.abs()).sum()
    }
}
