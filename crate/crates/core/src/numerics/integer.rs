//! Integer-lattice routines: column Hermite reduction, integer kernels,
//! saturation of a rational span, and Smith invariant factors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Extended gcd with a nonnegative gcd: returns `(g, x, y)` with `x*a + y*b = g`.
pub fn extended_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Column-style Hermite reduction. Returns `(rank, h, u)` where `u` is unimodular
/// (`cols x cols`, stored as rows of `u` indexed `[row][col]`), `h = a * u`, and the
/// columns `rank..cols` of `h` are zero.
pub fn column_reduce(a: &[Vec<BigInt>], cols: usize) -> (usize, Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let mut h: Vec<Vec<BigInt>> = a.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| (0..cols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut k = 0;
    for i in 0..h.len() {
        if k == cols {
            break;
        }
        for q in k + 1..cols {
            if h[i][q].is_zero() {
                continue;
            }
            if h[i][k].is_zero() {
                swap_cols(&mut h, k, q);
                swap_cols(&mut u, k, q);
                continue;
            }
            let a_ik = h[i][k].clone();
            let b_iq = h[i][q].clone();
            let (g, x, y) = extended_gcd(&a_ik, &b_iq);
            let s = &b_iq / &g;
            let t = &a_ik / &g;
            combine_cols(&mut h, k, q, &x, &y, &s, &t);
            combine_cols(&mut u, k, q, &x, &y, &s, &t);
        }
        if !h[i][k].is_zero() {
            k += 1;
        }
    }
    (k, h, u)
}

fn swap_cols(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

// col_k <- x*col_k + y*col_q ; col_q <- -s*col_k + t*col_q (old values)
fn combine_cols(m: &mut [Vec<BigInt>], k: usize, q: usize, x: &BigInt, y: &BigInt, s: &BigInt, t: &BigInt) {
    for row in m.iter_mut() {
        let ck = row[k].clone();
        let cq = row[q].clone();
        row[k] = x * &ck + y * &cq;
        row[q] = t * &cq - s * &ck;
    }
}

/// Basis of the integer kernel `{x in Z^cols : a x = 0}`.
pub fn integer_kernel(a: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    let (rank, _, u) = column_reduce(a, cols);
    (rank..cols)
        .map(|j| (0..cols).map(|i| u[i][j].clone()).collect())
        .collect()
}

/// Lattice basis of `span(generators) ∩ Z^dim`.
pub fn saturated_basis(generators: &[Vec<BigInt>], dim: usize) -> Vec<Vec<BigInt>> {
    if generators.is_empty() {
        return Vec::new();
    }
    let orth = integer_kernel(generators, dim);
    if orth.is_empty() {
        return (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
    }
    integer_kernel(&orth, dim)
}

/// Unimodular `p` with `p * v = e_1` for a primitive vector `v`; `None` if `v` is not primitive.
pub fn unimodular_to_first_basis_vector(v: &[BigInt]) -> Option<Vec<Vec<BigInt>>> {
    let dim = v.len();
    let (_, h, u) = column_reduce(&[v.to_vec()], dim);
    let g = h[0][0].clone();
    if !g.abs().is_one() {
        return None;
    }
    // v^T u = g e_1^T, so u^T v = g e_1.
    let mut p: Vec<Vec<BigInt>> = (0..dim).map(|i| (0..dim).map(|j| u[j][i].clone()).collect()).collect();
    if g.is_negative() {
        for x in p[0].iter_mut() {
            *x = -x.clone();
        }
    }
    Some(p)
}

/// Nonzero Smith invariant factors `d_1 | d_2 | ...` of an integer matrix.
pub fn smith_invariants(a: &[Vec<BigInt>]) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<BigInt>> = a.to_vec();
    let mut invariants = Vec::new();
    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = min_abs_entry(&m, t) else {
            break;
        };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&m[t][t]);
                for j in t..cols {
                    let v = &m[i][j] - &q * &m[t][j];
                    m[i][j] = v;
                }
                if !m[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&m[t][t]);
                for row in m.iter_mut().skip(t) {
                    let v = &row[j] - &q * &row[t];
                    row[j] = v;
                }
                if !m[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                let (pi, pj) = min_abs_entry_in_cross(&m, t);
                m.swap(t, pi);
                for row in m.iter_mut() {
                    row.swap(t, pj);
                }
                continue;
            }
            let pivot = m[t][t].clone();
            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !m[i][j].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    for j in t..cols {
                        let v = &m[t][j] + &m[i][j];
                        m[t][j] = v;
                    }
                }
                None => break,
            }
        }
        invariants.push(m[t][t].abs());
    }
    invariants
}

fn min_abs_entry(m: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in m.iter().enumerate().skip(t) {
        for (j, v) in row.iter().enumerate().skip(t) {
            if v.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| v.abs() < m[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn min_abs_entry_in_cross(m: &[Vec<BigInt>], t: usize) -> (usize, usize) {
    let mut best = (t, t);
    for i in t..m.len() {
        let v = &m[i][t];
        if !v.is_zero() && (m[best.0][best.1].is_zero() || v.abs() < m[best.0][best.1].abs()) {
            best = (i, t);
        }
    }
    for j in t..m[t].len() {
        let v = &m[t][j];
        if !v.is_zero() && (m[best.0][best.1].is_zero() || v.abs() < m[best.0][best.1].abs()) {
            best = (t, j);
        }
    }
    best
}

/// Index of the lattice generated by `generators` inside `Z^dim`, or `None` if
/// the generators do not span a full-rank sublattice.
pub fn sublattice_index(generators: &[Vec<BigInt>], dim: usize) -> Option<BigInt> {
    if dim == 0 {
        return Some(BigInt::one());
    }
    let inv = smith_invariants(generators);
    if inv.len() < dim {
        return None;
    }
    Some(inv.iter().product())
}
