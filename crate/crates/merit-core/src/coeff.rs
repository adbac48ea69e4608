//! Sparse simplex-column storage for the coefficient matrix, with exact
//! per-row aggregates maintained under column updates.
//!
//! The solver never owns an N×N dense object: each column keeps sorted
//! `(row, value)` pairs, and the matrix maintains a per-row value-ordered
//! index so row maxima and nonzero counts stay exact even when the entry that
//! attained a row's maximum shrinks. All values stored are strictly positive,
//! which makes `f64::to_bits` order-preserving and lets the index live in
//! plain `BTreeSet<(u64, usize)>` keys.

use std::collections::BTreeSet;

use crate::dense::{axpy, dot, DenseMatrix};
use crate::error::Error;

/// Entries at or below this magnitude are dropped during updates. Small
/// enough that the cumulative feasibility drift over 1e4 steps stays under
/// 1e-9 for desk-scale N.
pub const PURGE_THRESHOLD: f64 = 1e-15;

/// Column sums may drift from exactly 1 by at most this much before the
/// matrix is considered infeasible.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// One column of the coefficient matrix: sorted, strictly positive entries
/// over rows `0..dim`. An empty column represents the all-zero vector (the
/// sanctioned pre-first-step state); any stepped or warm-started column sums
/// to 1 within [`FEASIBILITY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSimplexColumn {
    dim: usize,
    entries: Vec<(usize, f64)>,
}

impl SparseSimplexColumn {
    pub fn empty(dim: usize) -> Self {
        SparseSimplexColumn { dim, entries: Vec::new() }
    }

    pub fn unit(dim: usize, row: usize) -> Self {
        assert!(row < dim);
        SparseSimplexColumn { dim, entries: vec![(row, 1.0)] }
    }

    /// Build from `(row, value)` pairs. Pairs need not be sorted; duplicates,
    /// out-of-range rows, and non-finite or negative values are rejected.
    /// Values at or below [`PURGE_THRESHOLD`] are dropped, mirroring what a
    /// step would do to them.
    pub fn from_entries(dim: usize, mut entries: Vec<(usize, f64)>) -> Result<Self, Error> {
        entries.sort_unstable_by_key(|&(i, _)| i);
        let mut out = Vec::with_capacity(entries.len());
        let mut last: Option<usize> = None;
        for (i, v) in entries {
            if i >= dim {
                return Err(Error::contract(format!("row index {i} out of range {dim}")));
            }
            if last == Some(i) {
                return Err(Error::contract(format!("duplicate entry for row {i}")));
            }
            last = Some(i);
            if !v.is_finite() {
                return Err(Error::contract(format!("non-finite value at row {i}")));
            }
            if v < 0.0 {
                return Err(Error::infeasible(format!("negative value {v} at row {i}")));
            }
            if v > PURGE_THRESHOLD {
                out.push((i, v));
            }
        }
        Ok(SparseSimplexColumn { dim, entries: out })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    /// Value at `row`, 0 for implicit entries.
    pub fn value_at(&self, row: usize) -> f64 {
        match self.entries.binary_search_by_key(&row, |&(i, _)| i) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v).sum()
    }

    /// Simplex feasibility: nonnegative (structural) and sum within
    /// [`FEASIBILITY_TOL`] of 1. Empty columns fail — they are a valid
    /// *initial* state but not a feasible simplex point.
    pub fn validate_simplex(&self) -> Result<(), Error> {
        let s = self.sum();
        if (s - 1.0).abs() > FEASIBILITY_TOL {
            return Err(Error::infeasible(format!("column sums to {s}, expected 1")));
        }
        Ok(())
    }
}

/// N×N coefficient matrix in sparse column storage.
///
/// Alongside the columns it maintains, per row, a value-ordered set of
/// `(value_bits, column)` keys. That index is what makes the row aggregates
/// (`row_max`, `row_nnz`) exact after *any* sequence of steps: when the entry
/// holding a row's maximum shrinks, the new maximum is the set's last element
/// — no rescan of other columns, no drift. Total memory stays Θ(N + nnz).
#[derive(Debug, Clone)]
pub struct CoefficientMatrix {
    dim: usize,
    columns: Vec<SparseSimplexColumn>,
    rows: Vec<BTreeSet<(u64, usize)>>,
    nonzero_rows: usize,
    total_nnz: usize,
}

impl PartialEq for CoefficientMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.columns == other.columns
    }
}

impl CoefficientMatrix {
    /// The all-zeros matrix: the standard cold-start state.
    pub fn zeros(dim: usize) -> Self {
        CoefficientMatrix {
            dim,
            columns: vec![SparseSimplexColumn::empty(dim); dim],
            rows: vec![BTreeSet::new(); dim],
            nonzero_rows: 0,
            total_nnz: 0,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let columns = (0..dim).map(|j| SparseSimplexColumn::unit(dim, j)).collect();
        Self::from_columns(columns).expect("identity columns are valid")
    }

    /// Assemble from per-column storage; all columns must share `dim` and the
    /// matrix must be square (`columns.len() == dim`).
    pub fn from_columns(columns: Vec<SparseSimplexColumn>) -> Result<Self, Error> {
        let dim = columns.len();
        if let Some(c) = columns.iter().find(|c| c.dim() != dim) {
            return Err(Error::contract(format!(
                "column dimension {} does not match matrix dimension {dim}",
                c.dim()
            )));
        }
        let mut m = CoefficientMatrix {
            dim,
            columns,
            rows: vec![BTreeSet::new(); dim],
            nonzero_rows: 0,
            total_nnz: 0,
        };
        m.rebuild_aggregates();
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, l: usize) -> &SparseSimplexColumn {
        &self.columns[l]
    }

    pub fn columns(&self) -> &[SparseSimplexColumn] {
        &self.columns
    }

    pub fn total_nnz(&self) -> usize {
        self.total_nnz
    }

    /// Number of rows with at least one explicit entry. O(1).
    pub fn nonzero_row_count(&self) -> usize {
        self.nonzero_rows
    }

    pub fn row_nnz(&self, n: usize) -> usize {
        self.rows[n].len()
    }

    /// Max entry of row `n`, 0 for empty rows. O(log nnz(row)).
    pub fn row_max(&self, n: usize) -> f64 {
        match self.rows[n].iter().next_back() {
            Some(&(bits, _)) => f64::from_bits(bits),
            None => 0.0,
        }
    }

    /// ℓ∞ norm of every row; the anchor-selection score vector.
    pub fn row_inf_norms(&self) -> Vec<f64> {
        (0..self.dim).map(|n| self.row_max(n)).collect()
    }

    /// Explicit entries of row `n` as `(column, value)`, ascending by value.
    pub fn row_entries(&self, n: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.rows[n].iter().map(|&(bits, col)| (col, f64::from_bits(bits)))
    }

    /// Logical memory model: explicit entries at (index + value) words plus
    /// two aggregate words per row. This is the accounting the benchmark
    /// reports are built on — deliberately *not* allocator RSS.
    pub fn logical_memory_bytes(&self) -> usize {
        self.total_nnz * 2 * std::mem::size_of::<f64>()
            + self.dim * 2 * std::mem::size_of::<f64>()
    }

    /// One Frank-Wolfe step on column `l`: `c ← (1 − alpha)·c + alpha·e_j`,
    /// with entries at or below [`PURGE_THRESHOLD`] dropped. Row aggregates
    /// are updated incrementally — cost O(nnz(c)·log nnz(row)) — and stay
    /// exact (see `rebuild_aggregates` tests).
    ///
    /// `alpha == 0` leaves the column untouched. `alpha == 1` replaces it by
    /// the unit vector `e_j` regardless of prior state, which is exactly the
    /// first sweep from a cold start.
    pub fn apply_fw_step(&mut self, l: usize, j: usize, alpha: f64) {
        assert!(l < self.dim, "column {l} out of range {}", self.dim);
        assert!(j < self.dim, "vertex {j} out of range {}", self.dim);
        assert!(alpha.is_finite() && (0.0..=1.0).contains(&alpha));
        if alpha == 0.0 {
            return;
        }
        let scale = 1.0 - alpha;
        let old = std::mem::take(&mut self.columns[l].entries);
        let mut new = Vec::with_capacity(old.len() + 1);
        let mut spiked = false;
        for (i, v) in old {
            if !spiked && j < i {
                // spike lands on a row the column did not previously touch
                self.index_insert(j, alpha, l);
                new.push((j, alpha));
                spiked = true;
            }
            let mut nv = scale * v;
            if i == j {
                nv += alpha;
                spiked = true;
            }
            self.index_remove(i, v, l);
            if nv > PURGE_THRESHOLD {
                self.index_insert(i, nv, l);
                new.push((i, nv));
            }
        }
        if !spiked && alpha > PURGE_THRESHOLD {
            self.index_insert(j, alpha, l);
            new.push((j, alpha));
        }
        self.columns[l].entries = new;
    }

    fn index_insert(&mut self, row: usize, value: f64, col: usize) {
        debug_assert!(value > 0.0 && value.is_finite());
        if self.rows[row].is_empty() {
            self.nonzero_rows += 1;
        }
        let fresh = self.rows[row].insert((value.to_bits(), col));
        debug_assert!(fresh, "duplicate index entry for row {row}, column {col}");
        self.total_nnz += 1;
    }

    fn index_remove(&mut self, row: usize, value: f64, col: usize) {
        let removed = self.rows[row].remove(&(value.to_bits(), col));
        debug_assert!(removed, "missing index entry for row {row}, column {col}");
        self.total_nnz -= 1;
        if self.rows[row].is_empty() {
            self.nonzero_rows -= 1;
        }
    }

    /// Drop and rebuild the row index from column storage. Needed after
    /// callers mutate columns directly (e.g. a parallel batch update); also
    /// the reference the incremental maintenance is tested against.
    pub fn rebuild_aggregates(&mut self) {
        for set in &mut self.rows {
            set.clear();
        }
        self.total_nnz = 0;
        self.nonzero_rows = 0;
        // Split borrows: move columns out, index, move back.
        let columns = std::mem::take(&mut self.columns);
        for (l, c) in columns.iter().enumerate() {
            for &(i, v) in &c.entries {
                self.index_insert(i, v, l);
            }
        }
        self.columns = columns;
    }

    /// Every column on the simplex (sum within tolerance of 1). Used to vet
    /// warm starts before a solve.
    pub fn validate_feasible(&self) -> Result<(), Error> {
        for (l, c) in self.columns.iter().enumerate() {
            c.validate_simplex()
                .map_err(|e| Error::infeasible(format!("column {l}: {e}")))?;
        }
        Ok(())
    }

    /// Apply steps to distinct columns in parallel (column storage only),
    /// then rebuild the row index serially. Produces states identical to the
    /// equivalent serial `apply_fw_step` sequence.
    pub fn apply_fw_steps_parallel(&mut self, steps: &[Option<(usize, f64)>]) {
        use rayon::prelude::*;
        assert_eq!(steps.len(), self.columns.len());
        let dim = self.dim;
        self.columns
            .par_iter_mut()
            .zip(steps.par_iter())
            .for_each(|(col, step)| {
                if let Some((j, alpha)) = *step {
                    assert!(j < dim && alpha.is_finite() && (0.0..=1.0).contains(&alpha));
                    if alpha == 0.0 {
                        return;
                    }
                    let scale = 1.0 - alpha;
                    let old = std::mem::take(&mut col.entries);
                    let mut new = Vec::with_capacity(old.len() + 1);
                    let mut spiked = false;
                    for (i, v) in old {
                        if !spiked && j < i {
                            new.push((j, alpha));
                            spiked = true;
                        }
                        let mut nv = scale * v;
                        if i == j {
                            nv += alpha;
                            spiked = true;
                        }
                        if nv > PURGE_THRESHOLD {
                            new.push((i, nv));
                        }
                    }
                    if !spiked && alpha > PURGE_THRESHOLD {
                        new.push((j, alpha));
                    }
                    col.entries = new;
                }
            });
        self.rebuild_aggregates();
    }
}

/// `X · c` for a sparse simplex column: O(M · nnz(c)), M-length output, no
/// N-length temporary.
pub fn mat_vec(x: &DenseMatrix, c: &SparseSimplexColumn) -> Vec<f64> {
    let mut out = vec![0.0; x.rows()];
    mat_vec_into(x, c, &mut out);
    out
}

pub fn mat_vec_into(x: &DenseMatrix, c: &SparseSimplexColumn, out: &mut [f64]) {
    assert_eq!(x.cols(), c.dim(), "dictionary and column dimension mismatch");
    assert_eq!(x.rows(), out.len());
    out.fill(0.0);
    for (i, v) in c.iter() {
        axpy(v, x.col(i), out);
    }
}

/// Residual `r = X·c − x_l` written into `r`; returns `‖r‖₂`.
pub fn residual_into(x: &DenseMatrix, c: &SparseSimplexColumn, l: usize, r: &mut [f64]) -> f64 {
    assert!(l < x.cols());
    mat_vec_into(x, c, r);
    for (ri, xi) in r.iter_mut().zip(x.col(l)) {
        *ri -= xi;
    }
    dot(r, r).sqrt()
}

/// `g[n] = X(:,n)ᵀ r` for all n — the fitting-gradient contraction. O(M·N)
/// with only the M-length residual as intermediate state.
pub fn gradient_from_residual(x: &DenseMatrix, r: &[f64], g: &mut [f64]) {
    assert_eq!(r.len(), x.rows());
    assert_eq!(g.len(), x.cols());
    for (n, gn) in g.iter_mut().enumerate() {
        *gn = dot(x.col(n), r);
    }
}

/// Root-mean-square column residual √(‖X − X·C‖²_F / N). Columns evaluate
/// in parallel; the sum reduces serially in index order so the value is
/// thread-count independent.
pub fn fit_rmse(x: &DenseMatrix, c: &CoefficientMatrix) -> f64 {
    use rayon::prelude::*;
    assert_eq!(x.cols(), c.dim(), "dictionary and coefficient size mismatch");
    let m = x.rows();
    let norms: Vec<f64> = (0..c.dim())
        .into_par_iter()
        .map_init(
            || vec![0.0; m],
            |r, l| residual_into(x, c.column(l), l, r),
        )
        .collect();
    (norms.iter().map(|v| v * v).sum::<f64>() / c.dim() as f64).sqrt()
}

/// Fitting gradient of column `l`: `Xᵀ(X·c − x_l)`. An empty `c` is treated
/// as the zero vector.
pub fn residual_gradient_column(
    x: &DenseMatrix,
    c: &SparseSimplexColumn,
    l: usize,
) -> Vec<f64> {
    let mut r = vec![0.0; x.rows()];
    residual_into(x, c, l, &mut r);
    let mut g = vec![0.0; x.cols()];
    gradient_from_residual(x, &r, &mut g);
    g
}
