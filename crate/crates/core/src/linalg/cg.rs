use super::{relative_residual, LinalgError, SolveMethod, SolveReport, SparseMatrix};

/// Iteration cap as a multiple of the system size.
pub const CG_MAX_ITERATION_FACTOR: usize = 20;

/// Jacobi-preconditioned conjugate gradients.
///
/// Works for symmetric positive definite systems and for consistent positive
/// semidefinite ones (right-hand side in the range). The returned report
/// carries the residual recomputed from scratch, not the recurrence estimate.
pub fn solve_spd(a: &SparseMatrix, b: &[f64], tol: f64) -> Result<(Vec<f64>, SolveReport), LinalgError> {
    let n = a.rows();
    if a.cols() != n {
        return Err(LinalgError::DimensionMismatch { expected: n, found: a.cols() });
    }
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch { expected: n, found: b.len() });
    }
    let b_norm = norm(b);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok((x, SolveReport { iterations: 0, relative_residual: 0.0, method: SolveMethod::ConjugateGradient }));
    }
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 }).collect();
    let max_iterations = CG_MAX_ITERATION_FACTOR * n.max(1);

    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut iterations = 0;
    while iterations < max_iterations {
        iterations += 1;
        let ap = a.mul_vec(&p);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);

        if norm(&r) <= tol * b_norm {
            // the recurrence drifts; confirm against the true residual
            r = residual(a, &x, b);
            if norm(&r) <= tol * b_norm {
                break;
            }
        }
        z.iter_mut().zip(r.iter().zip(&inv_diag)).for_each(|(z, (r, d))| *z = r * d);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        p.iter_mut().zip(&z).for_each(|(p, z)| *p = z + beta * *p);
    }

    let relative_residual = relative_residual(a, &x, b);
    if relative_residual <= tol {
        Ok((x, SolveReport { iterations, relative_residual, method: SolveMethod::ConjugateGradient }))
    } else {
        Err(LinalgError::NotConverged { iterations, relative_residual })
    }
}

fn residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    a.mul_vec(x).iter().zip(b).map(|(ax, b)| b - ax).collect()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += alpha * x);
}
