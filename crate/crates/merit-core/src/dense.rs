//! Dense column-major matrix storage plus the small vector kernels every hot
//! path leans on.

use crate::error::Error;

/// Dense `f64` matrix, column-major.
///
/// Column-major layout keeps per-column work (`col`, dot products, axpy)
/// contiguous; all solver kernels iterate columns, never rows.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// Build from column-major data. Rejects length mismatches and non-finite
    /// entries — every constructor that accepts external data enforces
    /// finiteness so downstream kernels never have to re-check.
    pub fn from_data(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, Error> {
        if data.len() != rows * cols {
            return Err(Error::contract(format!(
                "dense data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::contract(format!(
                "non-finite entry at row {}, column {}",
                pos % rows.max(1),
                pos / rows.max(1)
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self, Error> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::contract("ragged column lengths"));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for c in columns {
            data.extend_from_slice(c);
        }
        Self::from_data(rows, cols, data)
    }

    /// `f(i, j)` fills entry (row `i`, column `j`); caller guarantees finite
    /// values.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        debug_assert!(v.is_finite());
        self.data[j * self.rows + i] = v;
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn column_norm(&self, j: usize) -> f64 {
        norm2(self.col(j))
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    /// Squared Frobenius distance `‖self − other‖²`.
    pub fn frobenius_dist_sq(&self, other: &DenseMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    /// New matrix made of the listed columns, in the given order.
    pub fn gather_columns(&self, idx: &[usize]) -> DenseMatrix {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for &j in idx {
            assert!(j < self.cols, "column index {j} out of range {}", self.cols);
            data.extend_from_slice(self.col(j));
        }
        DenseMatrix { rows: self.rows, cols: idx.len(), data }
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Plain `self · rhs`; axpy over rhs columns, O(m·k·n). Fast enough for
    /// generator-scale inputs, not meant as a BLAS stand-in.
    pub fn matmul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimension mismatch");
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            let rc = rhs.col(j);
            let oc = out.col_mut(j);
            for (k, &w) in rc.iter().enumerate() {
                if w != 0.0 {
                    axpy(w, self.col(k), oc);
                }
            }
        }
        out
    }
}

/// Dot product with four independent accumulators. The lane split is fixed,
/// so results are bit-reproducible run to run while still vectorizing.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    let (a_main, a_tail) = a.split_at(chunks * 4);
    let (b_main, b_tail) = b.split_at(chunks * 4);
    for (ca, cb) in a_main.chunks_exact(4).zip(b_main.chunks_exact(4)) {
        acc[0] += ca[0] * cb[0];
        acc[1] += ca[1] * cb[1];
        acc[2] += ca[2] * cb[2];
        acc[3] += ca[3] * cb[3];
    }
    let mut tail = 0.0;
    for (x, y) in a_tail.iter().zip(b_tail) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `y += alpha * x`.
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_data_rejects_bad_shapes_and_values() {
        assert!(DenseMatrix::from_data(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::from_data(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(DenseMatrix::from_data(1, 2, vec![1.0, f64::INFINITY]).is_err());
        assert!(DenseMatrix::from_data(2, 2, vec![0.0; 4]).is_ok());
    }

    #[test]
    fn column_major_layout() {
        let m = DenseMatrix::from_data(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(m.get(0, 0), 1.0);
        assert_eq!(m.get(1, 0), 2.0);
        assert_eq!(m.get(0, 2), 5.0);
        assert_eq!(m.col(1), &[3.0, 4.0]);
    }

    #[test]
    fn dot_matches_naive_sum() {
        let a: Vec<f64> = (0..13).map(|i| i as f64 * 0.25).collect();
        let b: Vec<f64> = (0..13).map(|i| 1.0 - i as f64 * 0.5).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - naive).abs() < 1e-12);
    }

    #[test]
    fn matmul_identity_is_noop() {
        let m = DenseMatrix::from_data(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let out = m.matmul(&DenseMatrix::identity(2));
        assert_eq!(out, m);
    }

    #[test]
    fn gather_and_transpose() {
        let m = DenseMatrix::from_data(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let g = m.gather_columns(&[2, 0]);
        assert_eq!(g.col(0), &[5.0, 6.0]);
        assert_eq!(g.col(1), &[1.0, 2.0]);
        let t = m.transpose();
        assert_eq!(t.get(2, 1), m.get(1, 2));
    }
}
