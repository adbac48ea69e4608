//! Sweep-based Frank-Wolfe solver for the regularized self-dictionary fit
//!
//! ```text
//! minimize_C   ½·‖X − X·C‖²_F  +  λ·Σ_n φ_μ(row n of C)
//! subject to   every column of C on the probability simplex
//! ```
//!
//! Each sweep visits every active column once with a shared step size
//! α_t = 2/(t+2) and moves it toward a single simplex vertex — the
//! lowest-index minimizer of that column's gradient. A sweep runs in two
//! passes. Pass one is read-only: per column it forms the residual
//! `X·c_ℓ − x_ℓ`, contracts it against the dictionary, adds the penalty
//! gradient from a row-softmax snapshot taken at sweep entry, and picks the
//! vertex. Because nothing is written, the pass parallelizes over columns
//! without changing a single bit of the result. Pass two is serial: it
//! applies the rank-one steps in column order and maintains the sparse
//! aggregates incrementally.
//!
//! The softmax snapshot is deliberately *not* refreshed as columns step
//! within a sweep: every column prices its rows at the sweep-entry state.
//! That staleness is part of the update rule, not an approximation knob —
//! it is what makes the two-pass split exact and keeps the shifted
//! exponents non-positive (a column's own entries at its step time are
//! still its sweep-entry values, since no other column's step touches
//! them).
//!
//! Working state is the dictionary (read-only), the sparse coefficient
//! matrix, and O(M + N) scratch per worker — the dense N×N iterate never
//! exists.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeff::{gradient_from_residual, residual_into, CoefficientMatrix};
use crate::dense::DenseMatrix;
use crate::error::Error;
use crate::regularizer::{RowSoftmaxState, SmoothingParams};

/// Lowest-index minimizer of a gradient vector — the Frank-Wolfe vertex
/// pick. Ties break toward the smaller index, which is what makes runs
/// reproducible across thread counts. Non-finite entries are the caller's
/// problem; the solver screens them out before calling this.
pub fn select_vertex(gradient: &[f64]) -> usize {
    assert!(!gradient.is_empty(), "vertex pick over an empty gradient");
    let mut best = f64::INFINITY;
    let mut best_j = 0;
    for (j, &g) in gradient.iter().enumerate() {
        if g < best {
            best = g;
            best_j = j;
        }
    }
    best_j
}

/// Solver knobs. `Default` gives the production setting: a lightly
/// regularized fit with the tight smoothing the row penalty needs to act
/// like a row-support count.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct SolveConfig {
    /// Row-sparsity weight λ ≥ 0. Zero bypasses the penalty entirely: no
    /// snapshot is built and the objective is the pure fitting term.
    pub lambda: f64,
    /// Softmax temperature μ > 0.
    pub mu: f64,
    /// Hard sweep budget.
    pub max_sweeps: usize,
    /// Schedule offset for warm starts: the first sweep uses
    /// α = 2/(t_init+2). Required ≥ 1 when an initial iterate is supplied;
    /// ignored (treated as 0) on a cold start.
    pub t_init: usize,
    /// A column whose residual norm is at or below this freezes: it is
    /// skipped by later sweeps and its residual is carried forward. The
    /// default 0 disables the stop, except that an exact fit still freezes
    /// when λ = 0 — its gradient is identically zero there and a step
    /// would only corrupt it. Under λ > 0 exact fits stay live so the
    /// penalty can keep draining them.
    pub per_column_tol: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            lambda: 1e-6,
            mu: 1e-5,
            max_sweeps: 500,
            t_init: 0,
            per_column_tol: 0.0,
        }
    }
}

impl SolveConfig {
    fn validate(&self, has_init: bool) -> Result<(), Error> {
        SmoothingParams {
            mu: self.mu,
            lambda: self.lambda,
        }
        .validate()?;
        if !self.per_column_tol.is_finite() || self.per_column_tol < 0.0 {
            return Err(Error::contract(format!(
                "perColumnTol must be finite and nonnegative, got {}",
                self.per_column_tol
            )));
        }
        if has_init && self.t_init == 0 {
            return Err(Error::contract(
                "a warm start must declare its schedule offset: tInit >= 1",
            ));
        }
        Ok(())
    }
}

/// What a finished run looked like. Peak counts are sampled at
/// initialization and after every sweep, so they bound the whole
/// trajectory, not just the final iterate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveReport {
    pub sweeps_run: usize,
    pub frozen_columns: usize,
    /// Rows with at least one surviving entry in the final iterate — the
    /// candidate anchor count.
    pub support_union_size: usize,
    pub peak_nonzero_rows: usize,
    pub peak_total_nnz: usize,
    pub final_total_nnz: usize,
    pub final_rmse: f64,
    /// ‖X·c_ℓ − x_ℓ‖₂ per column, recomputed fresh on the final iterate.
    pub final_residual_per_column: Vec<f64>,
    /// Objective at sweep entry, one value per executed sweep.
    pub objective_trace: Vec<f64>,
}

/// Per-sweep telemetry returned by [`FwSolver::sweep`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepStats {
    /// Schedule index t this sweep ran at.
    pub index: usize,
    pub alpha: f64,
    /// ½‖X−XC‖²_F + λ·Σφ_μ evaluated at the sweep-entry iterate.
    pub objective_at_entry: f64,
    pub steps_taken: usize,
    pub newly_frozen: usize,
}

enum Decision {
    /// Frozen in an earlier sweep; cached residual still current.
    Skip,
    /// Residual reached tolerance at sweep entry.
    Freeze { resid: f64 },
    Step { vertex: usize, resid: f64 },
    /// Non-finite gradient entry; the sweep aborts before mutating state.
    Fail,
}

/// Driver owning the iterate. [`solve`] wraps the whole loop; the struct
/// is public so callers can step sweep-by-sweep and watch the trajectory.
#[derive(Debug)]
pub struct FwSolver<'a> {
    x: &'a DenseMatrix,
    cfg: SolveConfig,
    c: CoefficientMatrix,
    frozen: Vec<bool>,
    frozen_count: usize,
    resid_at_freeze: Vec<f64>,
    t: usize,
    sweeps_run: usize,
    objective_trace: Vec<f64>,
    peak_nonzero_rows: usize,
    peak_total_nnz: usize,
}

impl<'a> FwSolver<'a> {
    /// `init = None` is the cold start from C = 0 with the schedule at
    /// t = 0. A supplied iterate must be feasible and must come with
    /// `cfg.t_init >= 1` describing how far along the schedule it already
    /// is.
    pub fn new(
        x: &'a DenseMatrix,
        cfg: SolveConfig,
        init: Option<CoefficientMatrix>,
    ) -> Result<Self, Error> {
        if x.rows() == 0 || x.cols() == 0 {
            return Err(Error::contract("dictionary must be nonempty"));
        }
        cfg.validate(init.is_some())?;
        let n = x.cols();
        let (c, t) = match init {
            Some(c0) => {
                if c0.dim() != n {
                    return Err(Error::contract(format!(
                        "initial iterate is {}-dimensional, dictionary has {} columns",
                        c0.dim(),
                        n
                    )));
                }
                c0.validate_feasible()?;
                (c0, cfg.t_init)
            }
            None => (CoefficientMatrix::zeros(n), 0),
        };
        let mut solver = Self {
            x,
            cfg,
            c,
            frozen: vec![false; n],
            frozen_count: 0,
            resid_at_freeze: vec![f64::NAN; n],
            t,
            sweeps_run: 0,
            objective_trace: Vec::new(),
            peak_nonzero_rows: 0,
            peak_total_nnz: 0,
        };
        solver.sample_peaks();
        Ok(solver)
    }

    pub fn coefficients(&self) -> &CoefficientMatrix {
        &self.c
    }

    pub fn sweeps_run(&self) -> usize {
        self.sweeps_run
    }

    /// Schedule index the *next* sweep will run at.
    pub fn schedule_index(&self) -> usize {
        self.t
    }

    pub fn all_frozen(&self) -> bool {
        self.frozen_count == self.c.dim()
    }

    fn sample_peaks(&mut self) {
        self.peak_nonzero_rows = self.peak_nonzero_rows.max(self.c.nonzero_row_count());
        self.peak_total_nnz = self.peak_total_nnz.max(self.c.total_nnz());
    }

    /// One full pass over the active columns. On a non-finite gradient the
    /// iterate is left exactly as it was at sweep entry.
    pub fn sweep(&mut self) -> Result<SweepStats, Error> {
        let n = self.c.dim();
        let m = self.x.rows();
        let alpha = 2.0 / (self.t as f64 + 2.0);
        let lambda = self.cfg.lambda;

        let snapshot = if lambda > 0.0 {
            Some(RowSoftmaxState::build(&self.c, self.cfg.mu)?)
        } else {
            None
        };
        let penalty = snapshot
            .as_ref()
            .map_or(0.0, |s| lambda * s.penalty_sum());

        // Pass 1 — read-only. Per-worker scratch: residual (M) + gradient
        // (N). Collecting by index keeps the outcome independent of the
        // thread count.
        let x = self.x;
        let c = &self.c;
        let frozen = &self.frozen;
        let tol = self.cfg.per_column_tol;
        let snap = snapshot.as_ref();
        let decisions: Vec<Decision> = (0..n)
            .into_par_iter()
            .map_init(
                || (vec![0.0; m], vec![0.0; n]),
                |(r, g), l| {
                    if frozen[l] {
                        return Decision::Skip;
                    }
                    let resid = residual_into(x, c.column(l), l, r);
                    // tol = 0 disables the per-column stop, with one carve-out:
                    // an exactly-fit column under lambda = 0 has an identically
                    // zero gradient, and stepping on a zero gradient would pick
                    // an arbitrary vertex and corrupt the fit. Park it instead.
                    // Under lambda > 0 the penalty gradient still moves such
                    // columns, so they stay live.
                    if (tol > 0.0 && resid <= tol) || (resid == 0.0 && lambda == 0.0) {
                        return Decision::Freeze { resid };
                    }
                    gradient_from_residual(x, r, g);
                    if let Some(state) = snap {
                        state.accumulate_scaled_gradient(c, l, lambda, g);
                    }
                    if g.iter().any(|v| !v.is_finite()) {
                        return Decision::Fail;
                    }
                    Decision::Step {
                        vertex: select_vertex(g),
                        resid,
                    }
                },
            )
            .collect();

        if let Some(l) = decisions
            .iter()
            .position(|d| matches!(d, Decision::Fail))
        {
            return Err(Error::NonFiniteGradient { column: l });
        }

        // Pass 2 — serial updates in column order.
        let mut fit = 0.0;
        let mut steps_taken = 0;
        let mut newly_frozen = 0;
        for (l, d) in decisions.iter().enumerate() {
            match *d {
                Decision::Fail => unreachable!("screened above"),
                Decision::Skip => {
                    let r = self.resid_at_freeze[l];
                    fit += r * r;
                }
                Decision::Freeze { resid } => {
                    self.frozen[l] = true;
                    self.frozen_count += 1;
                    self.resid_at_freeze[l] = resid;
                    newly_frozen += 1;
                    fit += resid * resid;
                }
                Decision::Step { vertex, resid } => {
                    fit += resid * resid;
                    self.c.apply_fw_step(l, vertex, alpha);
                    steps_taken += 1;
                }
            }
        }

        let stats = SweepStats {
            index: self.t,
            alpha,
            objective_at_entry: 0.5 * fit + penalty,
            steps_taken,
            newly_frozen,
        };
        self.objective_trace.push(stats.objective_at_entry);
        self.t += 1;
        self.sweeps_run += 1;
        self.sample_peaks();
        Ok(stats)
    }

    /// Sweeps until every column is frozen or the budget runs out, then
    /// reports.
    pub fn run(mut self) -> Result<(CoefficientMatrix, SolveReport), Error> {
        while self.sweeps_run < self.cfg.max_sweeps && !self.all_frozen() {
            self.sweep()?;
        }
        self.finish()
    }

    /// Final residual pass and report assembly. Residuals are recomputed
    /// fresh for every column — cached freeze-time values are evidence,
    /// not output.
    pub fn finish(mut self) -> Result<(CoefficientMatrix, SolveReport), Error> {
        self.sample_peaks();
        let n = self.c.dim();
        let m = self.x.rows();
        let x = self.x;
        let c = &self.c;
        let final_residual_per_column: Vec<f64> = (0..n)
            .into_par_iter()
            .map_init(
                || vec![0.0; m],
                |r, l| residual_into(x, c.column(l), l, r),
            )
            .collect();
        let final_rmse = (final_residual_per_column
            .iter()
            .map(|r| r * r)
            .sum::<f64>()
            / n as f64)
            .sqrt();
        let report = SolveReport {
            sweeps_run: self.sweeps_run,
            frozen_columns: self.frozen_count,
            support_union_size: self.c.nonzero_row_count(),
            peak_nonzero_rows: self.peak_nonzero_rows,
            peak_total_nnz: self.peak_total_nnz,
            final_total_nnz: self.c.total_nnz(),
            final_rmse,
            final_residual_per_column,
            objective_trace: self.objective_trace,
        };
        Ok((self.c, report))
    }
}

/// Cold- or warm-started solve over the whole sweep budget.
pub fn solve(
    x: &DenseMatrix,
    cfg: &SolveConfig,
    init: Option<CoefficientMatrix>,
) -> Result<(CoefficientMatrix, SolveReport), Error> {
    FwSolver::new(x, cfg.clone(), init)?.run()
}
