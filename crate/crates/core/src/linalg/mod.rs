//! Sparse storage and the linear solvers used by the mixed method.
//!
//! * [`solve_spd`]: Jacobi-preconditioned conjugate gradients.
//! * [`solve_symmetric_indefinite`]: sparse LU with iterative refinement, used
//!   for saddle-point and bordered systems.
//! * [`dense_solve_oracle`]: pivoted dense LU for cross-checking small systems.

mod cg;
mod dense;
mod indefinite;
mod sparse;

use std::fmt;

use thiserror::Error;

pub use cg::{solve_spd, CG_MAX_ITERATION_FACTOR};
pub use dense::{dense_solve_oracle, DENSE_ORACLE_MAX};
pub use indefinite::solve_symmetric_indefinite;
pub use sparse::SparseMatrix;

pub(crate) use cg::{dot, norm};

/// Default relative residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    IndexOutOfBounds { row: usize, col: usize, rows: usize, cols: usize },
    #[error("solver did not converge after {iterations} iterations (relative residual {relative_residual:.3e})")]
    NotConverged { iterations: usize, relative_residual: f64 },
    #[error("matrix is singular")]
    Singular,
    #[error("system of size {size} exceeds the dense limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("sparse backend failure: {0}")]
    Backend(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    ConjugateGradient,
    SparseLu,
    DenseLu,
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveMethod::ConjugateGradient => "cg-jacobi",
            SolveMethod::SparseLu => "sparse-lu",
            SolveMethod::DenseLu => "dense-lu",
        })
    }
}

/// Outcome of a successful solve.
///
/// `iterations` counts CG steps, or refinement sweeps for the direct solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub relative_residual: f64,
    pub method: SolveMethod,
}

/// `|Ax - b| / max(|b|, tiny)`, recomputed from scratch.
pub fn relative_residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    let r: f64 = ax.iter().zip(b).map(|(ax, b)| (b - ax) * (b - ax)).sum::<f64>().sqrt();
    r / norm(b).max(f64::MIN_POSITIVE)
}
