//! Simplex-constrained least squares and the mixing-weight estimator
//!
//! `simplex_ls` solves `min_θ ½‖D·θ − b‖²` over the probability simplex
//! with Frank-Wolfe vertex iterations and *exact* line search — for a
//! quadratic the optimal step along `e_j − θ` is closed-form, so each
//! iteration costs one gradient and one clamp. Initialization picks the
//! best single vertex; the loop stops when the relative objective change
//! dies out. The exact line search matters: the fixed 2/(t+2) schedule
//! cannot hit vertex solutions exactly, and downstream contracts expect
//! unit columns to come back as unit weights.
//!
//! `estimate_h` runs one `simplex_ls` per data column against the anchor
//! dictionary — embarrassingly parallel, deterministic by indexed
//! collection.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::{axpy, dot, DenseMatrix};
use crate::error::Error;
use crate::spa::AnchorSet;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct SimplexLsConfig {
    pub max_iters: usize,
    /// Relative objective-change stop: quit once
    /// `|f_prev − f| ≤ tol·max(1, f_prev)`.
    pub tol: f64,
}

impl Default for SimplexLsConfig {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            tol: 1e-10,
        }
    }
}

impl SimplexLsConfig {
    fn validate(&self) -> Result<(), Error> {
        if self.max_iters == 0 {
            return Err(Error::contract("maxIters must be at least 1"));
        }
        if !self.tol.is_finite() || self.tol < 0.0 {
            return Err(Error::contract(format!(
                "tol must be finite and nonnegative, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// Weights θ on the simplex minimizing `½‖D·θ − b‖₂²`.
///
/// The iterate stays feasible by construction: every update is a convex
/// combination of the current point and a vertex, so entries are
/// nonnegative and the sum drifts from 1 only at roundoff scale.
pub fn simplex_ls(
    d: &DenseMatrix,
    b: &[f64],
    cfg: &SimplexLsConfig,
) -> Result<Vec<f64>, Error> {
    cfg.validate()?;
    let k = d.cols();
    let m = d.rows();
    if k == 0 {
        return Err(Error::contract("dictionary must have at least one column"));
    }
    if b.len() != m {
        return Err(Error::contract(format!(
            "target has {} rows, dictionary has {m}",
            b.len()
        )));
    }
    if !b.iter().all(|v| v.is_finite()) {
        return Err(Error::contract("target must be finite"));
    }

    // Best single vertex: argmin_j ‖d_j − b‖², lowest index on ties.
    let mut best_j = 0;
    let mut best_val = f64::INFINITY;
    for j in 0..k {
        let dj = d.col(j);
        let mut v = 0.0;
        for (a, t) in dj.iter().zip(b) {
            let r = a - t;
            v += r * r;
        }
        if v < best_val {
            best_val = v;
            best_j = j;
        }
    }

    let mut theta = vec![0.0; k];
    theta[best_j] = 1.0;
    // Residual r = D·θ − b, maintained incrementally.
    let mut r: Vec<f64> = d.col(best_j).iter().zip(b).map(|(a, t)| a - t).collect();
    let mut grad = vec![0.0; k];
    let mut dir = vec![0.0; m];
    let mut f_prev = 0.5 * dot(&r, &r);

    for _ in 0..cfg.max_iters {
        for (j, g) in grad.iter_mut().enumerate() {
            *g = dot(d.col(j), &r);
        }
        let j = crate::solver::select_vertex(&grad);
        // Duality gap ∇ᵀ(θ − e_j) ≥ 0; zero exactly at the optimum.
        let gap = dot(&grad, &theta) - grad[j];

        // dir = D·(e_j − θ) = d_j − (r + b).
        for ((q, &dj), (&ri, &bi)) in dir.iter_mut().zip(d.col(j)).zip(r.iter().zip(b)) {
            *q = dj - ri - bi;
        }
        let denom = dot(&dir, &dir);
        // gap = −rᵀ·dir, so a positive gap forces a nonzero direction;
        // denom == 0 therefore only happens at the optimum.
        let alpha = if denom > 0.0 {
            (gap / denom).clamp(0.0, 1.0)
        } else {
            0.0
        };

        if alpha > 0.0 {
            for t in theta.iter_mut() {
                *t *= 1.0 - alpha;
            }
            theta[j] += alpha;
            axpy(alpha, &dir, &mut r);
        }

        let f = 0.5 * dot(&r, &r);
        if (f_prev - f).abs() <= cfg.tol * f_prev.max(1.0) {
            break;
        }
        f_prev = f;
    }
    Ok(theta)
}

/// Mixing weights for every column of `x` against the dictionary of anchor
/// columns: a K×N column-stochastic estimate. Columns solve independently.
pub fn estimate_h(
    x: &DenseMatrix,
    anchors: &AnchorSet,
    cfg: &SimplexLsConfig,
) -> Result<DenseMatrix, Error> {
    cfg.validate()?;
    if anchors.is_empty() {
        return Err(Error::contract("anchor set must be nonempty"));
    }
    if let Some(&bad) = anchors.indices().iter().find(|&&a| a >= x.cols()) {
        return Err(Error::contract(format!(
            "anchor {bad} out of range for {} columns",
            x.cols()
        )));
    }
    let d = x.gather_columns(anchors.indices());
    let n = x.cols();
    let solutions: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|l| simplex_ls(&d, x.col(l), cfg))
        .collect::<Result<_, _>>()?;
    Ok(DenseMatrix::from_columns(&solutions).expect("uniform column length"))
}
