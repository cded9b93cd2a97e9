use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::NumericsError;

/// Exact rational scalar; always stored reduced with a positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Least common multiple of all denominators.
pub fn common_denominator(values: &[Rational]) -> BigInt {
    use num_integer::Integer;
    values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Scales a rational vector to a primitive integer vector with the same direction.
pub fn primitive_integer_vector(values: &[Rational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let den = common_denominator(values);
    let ints: Vec<BigInt> = values
        .iter()
        .map(|v| (v * Rational::from_integer(den.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|v| v / &g).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Dense row-major matrix over the rationals. Zero-sized shapes are rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Rref {
    pub matrix: RationalMatrix,
    pub pivots: Vec<usize>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self, NumericsError> {
        if rows == 0 || cols == 0 {
            return Err(NumericsError::EmptyMatrix);
        }
        if entries.len() != rows * cols {
            return Err(NumericsError::ShapeMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self, NumericsError> {
        Self::new(rows, cols, vec![Rational::zero(); rows * cols])
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Result<Self, NumericsError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(NumericsError::ShapeMismatch {
                expected: cols,
                found: rows.iter().map(Vec::len).find(|&l| l != cols).unwrap_or(0),
            });
        }
        Self::new(rows.len(), cols, rows.iter().flatten().cloned().collect())
    }

    pub fn from_int_rows<T: Copy + Into<BigInt>>(rows: &[Vec<T>]) -> Result<Self, NumericsError> {
        let converted: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| Rational::from_integer(v.into())).collect())
            .collect();
        Self::from_rows(&converted)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length must equal column count");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.entries.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).recip();
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    if m.get(r, j).is_zero() {
                        continue;
                    }
                    let v = m.get(i, j) - &factor * m.get(r, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right nullspace, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let rref = self.rref();
        nullspace_from_rref(&rref)
    }

    /// Some solution of `self * x = b`, or `None` if the system is inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Vec::with_capacity(self.rows * (self.cols + 1));
        for i in 0..self.rows {
            aug.extend(self.row(i).iter().cloned());
            aug.push(b[i].clone());
        }
        let aug = RationalMatrix {
            rows: self.rows,
            cols: self.cols + 1,
            entries: aug,
        };
        let rref = aug.rref();
        if rref.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (r, &c) in rref.pivots.iter().enumerate() {
            x[c] = rref.matrix.get(r, self.cols).clone();
        }
        Some(x)
    }

    /// Exact positive-semidefiniteness of a symmetric matrix by symmetric
    /// elimination on positive diagonal pivots.
    pub fn is_psd(&self) -> bool {
        let n = self.rows;
        if n != self.cols {
            return false;
        }
        let mut a: Vec<Vec<Rational>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut alive: Vec<usize> = (0..n).collect();
        while !alive.is_empty() {
            if alive.iter().any(|&i| a[i][i].is_negative()) {
                return false;
            }
            let Some(pos) = alive.iter().position(|&i| a[i][i].is_positive()) else {
                // zero diagonal: PSD only if the remaining block vanishes
                return alive.iter().all(|&i| alive.iter().all(|&j| a[i][j].is_zero()));
            };
            let p = alive.swap_remove(pos);
            let pivot = a[p][p].clone();
            for &i in &alive {
                if a[i][p].is_zero() {
                    continue;
                }
                let factor = &a[i][p] / &pivot;
                for &j in &alive {
                    let v = &factor * &a[p][j];
                    a[i][j] -= v;
                }
            }
        }
        true
    }

    /// Determinant of a square matrix.
    pub fn determinant(&self) -> Rational {
        assert_eq!(self.rows, self.cols, "determinant needs a square matrix");
        let mut m = self.clone();
        let n = self.rows;
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                for j in 0..n {
                    m.entries.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let pivot = m.get(c, c).clone();
            det *= &pivot;
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let factor = m.get(i, c) / &pivot;
                for j in c..n {
                    let v = m.get(i, j) - &factor * m.get(c, j);
                    m.set(i, j, v);
                }
            }
        }
        det
    }
}

fn nullspace_from_rref(rref: &Rref) -> Vec<Vec<Rational>> {
    let m = &rref.matrix;
    let mut is_pivot = vec![false; m.cols];
    for &p in &rref.pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..m.cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rational::zero(); m.cols];
        v[free] = Rational::one();
        for (r, &p) in rref.pivots.iter().enumerate() {
            v[p] = -m.get(r, free).clone();
        }
        basis.push(v);
    }
    basis
}

/// Exact rank and a right-nullspace basis; `rank + basis.len() == cols`.
pub fn rank_and_nullspace(a: &RationalMatrix) -> (usize, Vec<Vec<Rational>>) {
    let rref = a.rref();
    let basis = nullspace_from_rref(&rref);
    (rref.pivots.len(), basis)
}

/// Rank of a list of equal-length vectors; the empty list has rank 0.
pub fn rank_of_vectors(vectors: &[Vec<Rational>]) -> usize {
    if vectors.is_empty() || vectors[0].is_empty() {
        return 0;
    }
    RationalMatrix::from_rows(vectors)
        .map(|m| m.rank())
        .unwrap_or(0)
}


pub fn max_abs(values: &[Rational]) -> Rational {
    values
        .iter()
        .map(|v| v.abs())
        .max()
        .unwrap_or_else(Rational::zero)
}
