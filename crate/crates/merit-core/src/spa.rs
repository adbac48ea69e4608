//! Successive-projection anchor baseline and warm starts built from it
//!
//! The greedy baseline picks the column of largest norm, projects every
//! column onto the orthogonal complement of the pick, and repeats. It is
//! fast and exact on clean separable data but needs an M×N residual work
//! copy — the memory-frugal solver exists precisely because of that. Here
//! it serves two roles: a comparison baseline, and a cheap initializer
//! whose fit quality sets the warm-start schedule offset.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeff::{CoefficientMatrix, SparseSimplexColumn};
use crate::dense::{axpy, dot, DenseMatrix};
use crate::error::Error;
use crate::estimator::{simplex_ls, SimplexLsConfig};

/// Ordered, duplicate-free column indices. Order is selection order, which
/// callers may care about; set-level comparison goes through [`Self::sorted`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AnchorSet {
    indices: Vec<usize>,
}

impl AnchorSet {
    pub fn new(indices: Vec<usize>) -> Result<Self, Error> {
        let mut seen = indices.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::contract("anchor indices must be distinct"));
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.indices.contains(&idx)
    }

    /// Ascending copy, for set comparison and stable output.
    pub fn sorted(&self) -> Vec<usize> {
        let mut s = self.indices.clone();
        s.sort_unstable();
        s
    }

    pub fn same_set(&self, other: &AnchorSet) -> bool {
        self.sorted() == other.sorted()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpaResult {
    /// Picks in selection order.
    pub anchors: AnchorSet,
    /// Set when the residual collapsed before k picks: the data had lower
    /// effective rank than requested, and `anchors` is short.
    pub degenerate: bool,
}

/// Relative floor under which a residual column counts as numerically gone.
const DEGENERACY_RATIO: f64 = 1e-12;

fn spa_core(x: &DenseMatrix, k: usize) -> Result<(SpaResult, DenseMatrix), Error> {
    let n = x.cols();
    if x.rows() == 0 || n == 0 {
        return Err(Error::contract("matrix must be nonempty"));
    }
    if k == 0 || k > n {
        return Err(Error::contract(format!(
            "requested {k} anchors from {n} columns"
        )));
    }
    let mut r = x.clone();
    let initial_max = (0..n)
        .map(|j| norm_of(r.col(j)))
        .fold(0.0_f64, f64::max);
    if initial_max == 0.0 {
        return Err(Error::contract("matrix is identically zero"));
    }
    let floor = DEGENERACY_RATIO * initial_max;

    let mut picks = Vec::with_capacity(k);
    let mut degenerate = false;
    for _ in 0..k {
        let mut best = 0.0;
        let mut best_j = 0;
        for j in 0..n {
            let v = norm_of(r.col(j));
            if v > best {
                best = v;
                best_j = j;
            }
        }
        if best <= floor {
            degenerate = true;
            break;
        }
        picks.push(best_j);
        // Project every column onto the complement of the pick.
        let u: Vec<f64> = r.col(best_j).iter().map(|v| v / best).collect();
        for j in 0..n {
            let coeff = dot(&u, r.col(j));
            axpy(-coeff, &u, r.col_mut(j));
        }
    }
    let anchors = AnchorSet::new(picks).expect("greedy picks are distinct");
    Ok((SpaResult { anchors, degenerate }, r))
}

fn norm_of(col: &[f64]) -> f64 {
    dot(col, col).sqrt()
}

/// Greedy successive-projection anchor selection. Ties break toward the
/// lower column index.
pub fn spa_select(x: &DenseMatrix, k: usize) -> Result<SpaResult, Error> {
    spa_core(x, k).map(|(res, _)| res)
}

/// As [`spa_select`], additionally returning the final residual matrix
/// (every column projected off the span of the picks).
pub fn spa_select_with_residual(
    x: &DenseMatrix,
    k: usize,
) -> Result<(SpaResult, DenseMatrix), Error> {
    spa_core(x, k)
}

/// Feasible coefficient matrix supported on the anchor rows: column ℓ
/// carries the simplex least-squares weights of x_ℓ against the anchor
/// columns. This is the standard warm start handed to the sweep solver.
pub fn build_warm_start(
    x: &DenseMatrix,
    anchors: &AnchorSet,
    cfg: &SimplexLsConfig,
) -> Result<CoefficientMatrix, Error> {
    if anchors.is_empty() {
        return Err(Error::contract("anchor set must be nonempty"));
    }
    let n = x.cols();
    if let Some(&bad) = anchors.indices().iter().find(|&&a| a >= n) {
        return Err(Error::contract(format!(
            "anchor {bad} out of range for {n} columns"
        )));
    }
    let d = x.gather_columns(anchors.indices());
    let columns: Vec<SparseSimplexColumn> = (0..n)
        .into_par_iter()
        .map(|l| {
            let theta = simplex_ls(&d, x.col(l), cfg)?;
            let entries: Vec<(usize, f64)> = anchors
                .indices()
                .iter()
                .zip(&theta)
                .map(|(&a, &t)| (a, t))
                .collect();
            SparseSimplexColumn::from_entries(n, entries)
        })
        .collect::<Result<_, _>>()?;
    CoefficientMatrix::from_columns(columns)
}

pub const MAX_SCHEDULE_OFFSET: usize = 1_000_000_000;

/// Schedule offset matching a warm start of the given fit quality:
/// `round(1/rmse)` clamped to `[1, 1e9]`. A perfect fit maps to the cap
/// (the schedule is effectively finished); a useless fit maps to 1.
pub fn warm_start_schedule_offset(rmse: f64) -> usize {
    if rmse.is_nan() {
        return 1;
    }
    (1.0 / rmse).round().clamp(1.0, MAX_SCHEDULE_OFFSET as f64) as usize
}
