use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Col;

use super::{relative_residual, LinalgError, SolveMethod, SolveReport, SparseMatrix};

/// Refinement sweeps applied after the factorization if the residual misses `tol`.
const MAX_REFINEMENT_STEPS: usize = 3;

/// Solves a nonsingular (typically symmetric indefinite) sparse system with a
/// sparse LU factorization followed by iterative refinement.
pub fn solve_symmetric_indefinite(
    a: &SparseMatrix,
    b: &[f64],
    tol: f64,
) -> Result<(Vec<f64>, SolveReport), LinalgError> {
    let n = a.rows();
    if a.cols() != n {
        return Err(LinalgError::DimensionMismatch { expected: n, found: a.cols() });
    }
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch { expected: n, found: b.len() });
    }
    if b.iter().all(|&v| v == 0.0) {
        return Ok((vec![0.0; n], SolveReport { iterations: 0, relative_residual: 0.0, method: SolveMethod::SparseLu }));
    }

    let triplets: Vec<_> = a.triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
    let matrix = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| LinalgError::Backend(format!("{e:?}")))?;
    let lu = matrix.sp_lu().map_err(|_| LinalgError::Singular)?;

    let rhs = Col::<f64>::from_fn(n, |i| b[i]);
    let sol = lu.solve(&rhs);
    let mut x: Vec<f64> = (0..n).map(|i| sol[i]).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(LinalgError::Singular);
    }

    let mut residual = relative_residual(a, &x, b);
    let mut steps = 0;
    while residual > tol && steps < MAX_REFINEMENT_STEPS {
        let ax = a.mul_vec(&x);
        let r = Col::<f64>::from_fn(n, |i| b[i] - ax[i]);
        let dx = lu.solve(&r);
        x.iter_mut().enumerate().for_each(|(i, xi)| *xi += dx[i]);
        residual = relative_residual(a, &x, b);
        steps += 1;
    }
    if residual <= tol {
        Ok((x, SolveReport { iterations: steps, relative_residual: residual, method: SolveMethod::SparseLu }))
    } else {
        Err(LinalgError::NotConverged { iterations: steps, relative_residual: residual })
    }
}
