use std::io::{self, Write};

use nalgebra::DMatrix;

use super::LinalgError;

/// Compressed sparse row matrix.
///
/// Column indices are strictly increasing within each row and no explicit
/// zeros are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed
    /// in input order, so the result is bit-reproducible for a fixed input.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self, LinalgError> {
        if let Some(&(r, c, _)) = triplets.iter().find(|&&(r, c, _)| r >= rows || c >= cols) {
            return Err(LinalgError::IndexOutOfBounds { row: r, col: c, rows, cols });
        }
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&k| (triplets[k].0, triplets[k].1));

        let mut row_offsets = vec![0usize; rows + 1];
        let mut col_indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        let mut k = 0;
        while k < order.len() {
            let (r, c, mut v) = triplets[order[k]];
            k += 1;
            while k < order.len() && (triplets[order[k]].0, triplets[order[k]].1) == (r, c) {
                v += triplets[order[k]].2;
                k += 1;
            }
            if v != 0.0 {
                col_indices.push(c);
                values.push(v);
                row_offsets[r + 1] += 1;
            }
        }
        for r in 0..rows {
            row_offsets[r + 1] += row_offsets[r];
        }
        Ok(Self { rows, cols, row_offsets, col_indices, values })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let triplets: Vec<_> = diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::from_triplets(diag.len(), diag.len(), &triplets).expect("diagonal indices are in range")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, row_offsets: vec![0; rows + 1], col_indices: Vec::new(), values: Vec::new() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[range.clone()], &self.values[range])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    /// All stored entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    /// Sparse matrix-vector product.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if x.len() != self.cols {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, found: x.len() });
        }
        Ok(self.mul_vec(x))
    }

    pub(crate) fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum()
            })
            .collect()
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> Result<f64, LinalgError> {
        if x.len() != self.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.rows, found: x.len() });
        }
        Ok(self.spmv(y)?.iter().zip(x).map(|(a, b)| a * b).sum())
    }

    pub fn transpose(&self) -> Self {
        let triplets: Vec<_> = self.triplets().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.cols, self.rows, &triplets).expect("transposed indices are in range")
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &SparseMatrix) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut accum = vec![0.0; other.cols];
        let mut touched = vec![false; other.cols];
        let mut pattern = Vec::new();
        let mut triplets = Vec::new();
        for i in 0..self.rows {
            let (a_cols, a_vals) = self.row(i);
            for (&k, &a) in a_cols.iter().zip(a_vals) {
                let (b_cols, b_vals) = other.row(k);
                for (&j, &b) in b_cols.iter().zip(b_vals) {
                    if !touched[j] {
                        touched[j] = true;
                        pattern.push(j);
                    }
                    accum[j] += a * b;
                }
            }
            pattern.sort_unstable();
            for &j in &pattern {
                triplets.push((i, j, accum[j]));
                accum[j] = 0.0;
                touched[j] = false;
            }
            pattern.clear();
        }
        Self::from_triplets(self.rows, other.cols, &triplets)
    }

    /// Scales row `i` by `scale[i]`.
    pub fn scale_rows(&self, scale: &[f64]) -> Self {
        let mut out = self.clone();
        for (i, &factor) in scale.iter().enumerate().take(self.rows) {
            for value in &mut out.values[self.row_offsets[i]..self.row_offsets[i + 1]] {
                *value *= factor;
            }
        }
        out
    }

    /// Submatrix of the listed rows (in the given order), all columns kept.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut row_offsets = Vec::with_capacity(rows.len() + 1);
        row_offsets.push(0);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        for &r in rows {
            let (c, v) = self.row(r);
            col_indices.extend_from_slice(c);
            values.extend_from_slice(v);
            row_offsets.push(col_indices.len());
        }
        Self { rows: rows.len(), cols: self.cols, row_offsets, col_indices, values }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut dense = DMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.triplets() {
            dense[(i, j)] = v;
        }
        dense
    }

    /// Largest `|a_ij - a_ji|`; infinite for non-square matrices.
    pub fn symmetry_defect(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        self.triplets()
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Sum of all stored entries.
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// MatrixMarket coordinate export. Exactly symmetric matrices are written
    /// as `symmetric` (lower triangle only), everything else as `general`.
    pub fn write_matrix_market<W: Write>(&self, mut out: W) -> io::Result<()> {
        let symmetric = self.symmetry_defect() == 0.0;
        let entries: Vec<_> = self.triplets().filter(|&(i, j, _)| !symmetric || i >= j).collect();
        let kind = if symmetric { "symmetric" } else { "general" };
        writeln!(out, "%%MatrixMarket matrix coordinate real {kind}")?;
        writeln!(out, "{} {} {}", self.rows, self.cols, entries.len())?;
        for (i, j, v) in entries {
            writeln!(out, "{} {} {:.17e}", i + 1, j + 1, v)?;
        }
        Ok(())
    }
}
