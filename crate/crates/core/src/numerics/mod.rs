//! Exact rational and integer linear algebra, plus the small dense symmetric
//! eigen-solver used by the positive-semidefinite checks.

mod integer;
mod rational;
mod sym;

use thiserror::Error;

pub use integer::{
    column_reduce, extended_gcd, integer_kernel, saturated_basis, smith_invariants, sublattice_index,
    unimodular_to_first_basis_vector,
};
pub use rational::{
    common_denominator, dot, max_abs, primitive_integer_vector, rank_and_nullspace, rank_of_vectors, rat,
    rat_frac, rat_to_f64, Rational, RationalMatrix, Rref,
};
pub use sym::{psd_project, sym_eigen, SymEigen, SymMatrix, DEFAULT_EIGEN_TOL};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericsError {
    #[error("matrix with a zero dimension")]
    EmptyMatrix,
    #[error("expected {expected} entries, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NonConvergence { sweeps: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
}
