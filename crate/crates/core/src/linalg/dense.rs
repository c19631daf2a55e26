use nalgebra::DMatrix;

use super::LinalgError;

/// Largest system the dense oracle accepts.
pub const DENSE_ORACLE_MAX: usize = 2000;

/// Reference solver for small systems: LU with partial pivoting.
///
/// Kept deliberately independent of the sparse backends so it can serve as a
/// test oracle for them.
pub fn dense_solve_oracle(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(LinalgError::DimensionMismatch { expected: n, found: a.ncols() });
    }
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch { expected: n, found: b.len() });
    }
    if n > DENSE_ORACLE_MAX {
        return Err(LinalgError::TooLarge { size: n, limit: DENSE_ORACLE_MAX });
    }
    let mut lu = a.clone();
    let mut x = b.to_vec();
    let scale = lu.amax();
    let threshold = f64::EPSILON * n.max(1) as f64 * scale;
    if scale == 0.0 {
        return Err(LinalgError::Singular);
    }

    for k in 0..n {
        let (pivot_row, pivot) = (k..n)
            .map(|i| (i, lu[(i, k)].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot <= threshold {
            return Err(LinalgError::Singular);
        }
        if pivot_row != k {
            lu.swap_rows(k, pivot_row);
            x.swap(k, pivot_row);
        }
        let diag = lu[(k, k)];
        for i in k + 1..n {
            let factor = lu[(i, k)] / diag;
            if factor == 0.0 {
                continue;
            }
            for j in k + 1..n {
                lu[(i, j)] -= factor * lu[(k, j)];
            }
            x[i] -= factor * x[k];
        }
    }
    for k in (0..n).rev() {
        let tail: f64 = (k + 1..n).map(|j| lu[(k, j)] * x[j]).sum();
        x[k] = (x[k] - tail) / lu[(k, k)];
    }
    Ok(x)
}
