//! Anchor selection from the solved coefficients, plus model diagnostics
//!
//! Selection itself is one line of linear algebra — the k rows of C with
//! the largest ℓ∞ norms. Everything else here quantifies *when that is
//! trustworthy*: the norm floor anchor rows must clear, the margin by
//! which dictionary vertices stand outside each other's hulls, the
//! identifiability radius those quantities imply, and two checks on the
//! update dynamics (warm-start regularity, and the row-gap safety margin
//! of the smoothed penalty).

use serde::{Deserialize, Serialize};

use crate::coeff::CoefficientMatrix;
use crate::dense::{dot, DenseMatrix};
use crate::error::Error;
use crate::estimator::{simplex_ls, SimplexLsConfig};
use crate::spa::AnchorSet;

/// Rows of C selected as anchors, ascending. `underfilled` is set when C
/// had fewer nonzero rows than requested; the list is then short rather
/// than padded with arbitrary empty rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AnchorSelection {
    pub anchors: AnchorSet,
    pub underfilled: bool,
}

/// Top-k rows of C by ℓ∞ norm; ties break toward the lower row index.
pub fn select_anchors(c: &CoefficientMatrix, k: usize) -> Result<AnchorSelection, Error> {
    let n = c.dim();
    if k == 0 || k > n {
        return Err(Error::contract(format!("requested {k} anchors from {n} rows")));
    }
    let norms = c.row_inf_norms();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        norms[b]
            .partial_cmp(&norms[a])
            .expect("row norms are finite")
            .then(a.cmp(&b))
    });
    let mut picked: Vec<usize> = order
        .into_iter()
        .take(k)
        .filter(|&i| norms[i] > 0.0)
        .collect();
    let underfilled = picked.len() < k;
    picked.sort_unstable();
    Ok(AnchorSelection {
        anchors: AnchorSet::new(picked).expect("row indices are distinct"),
        underfilled,
    })
}

/// Lower bound on anchor-row ℓ∞ norms implied by a fitting error: rows
/// below `1 − fit_error·√k/2` cannot be anchors of a fit that good.
pub fn anchor_norm_floor(fit_error: f64, k: usize) -> f64 {
    1.0 - fit_error * (k as f64).sqrt() / 2.0
}

/// How far each dictionary column stands outside the convex hull of the
/// others: `min_k min_{θ∈Δ} ‖w_k − W_{−k}·θ‖₂`. Zero means a column is a
/// convex combination of the rest and anchors are not identifiable. For a
/// single column the hull of "the others" is empty and the margin is its
/// norm.
pub fn vertex_margin(w: &DenseMatrix, cfg: &SimplexLsConfig) -> Result<f64, Error> {
    let k = w.cols();
    if k == 0 {
        return Err(Error::contract("dictionary must have at least one column"));
    }
    if k == 1 {
        return Ok(dot(w.col(0), w.col(0)).sqrt());
    }
    let mut margin = f64::INFINITY;
    for target in 0..k {
        let rest: Vec<usize> = (0..k).filter(|&j| j != target).collect();
        let d = w.gather_columns(&rest);
        let theta = simplex_ls(&d, w.col(target), cfg)?;
        let mut dist_sq = 0.0;
        for i in 0..w.rows() {
            let mut r = -w.get(i, target);
            for (j, &t) in theta.iter().enumerate() {
                r += t * d.get(i, j);
            }
            dist_sq += r * r;
        }
        margin = margin.min(dist_sq.sqrt());
    }
    Ok(margin)
}

/// Largest eigenvalue of WᵀW by power iteration from the uniform vector.
pub fn gram_spectral_norm(w: &DenseMatrix) -> f64 {
    let k = w.cols();
    if k == 0 {
        return 0.0;
    }
    let m = w.rows();
    let mut v = vec![1.0 / (k as f64).sqrt(); k];
    let mut wv = vec![0.0; m];
    let mut z = vec![0.0; k];
    let mut lambda = 0.0;
    for _ in 0..300 {
        for (i, wi) in wv.iter_mut().enumerate() {
            *wi = 0.0;
            for (j, &vj) in v.iter().enumerate() {
                *wi += vj * w.get(i, j);
            }
        }
        for (j, zj) in z.iter_mut().enumerate() {
            *zj = dot(w.col(j), &wv);
        }
        let nz = dot(&z, &z).sqrt();
        if nz == 0.0 {
            return 0.0;
        }
        lambda = dot(&wv, &wv);
        for (vj, zj) in v.iter_mut().zip(&z) {
            *vj = zj / nz;
        }
    }
    lambda
}

/// Identifiability-side diagnostics of a planted model (W, H, V).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TheoryDiagnostics {
    /// Largest dictionary column norm.
    pub gamma: f64,
    /// Largest noise column norm.
    pub delta_bound: f64,
    /// Largest mixing weight outside the anchor columns.
    pub d_h: f64,
    /// Vertex margin of W.
    pub alpha_w: f64,
    /// Radius inside which picked rows must sit next to true anchors.
    pub beta: f64,
    /// Inflated mixing bound entering the update-safety margin.
    pub d_prime_h: f64,
}

/// Columns of H that are exact unit vectors, validating that every row
/// owns at least one. This is the planted-anchor structure the
/// diagnostics are defined against.
fn anchor_columns_of(h: &DenseMatrix) -> Result<Vec<usize>, Error> {
    let (k, n) = (h.rows(), h.cols());
    if k == 0 || n == 0 {
        return Err(Error::contract("mixing matrix must be nonempty"));
    }
    let mut covered = vec![false; k];
    let mut anchors = Vec::new();
    for j in 0..n {
        let col = h.col(j);
        let mut sum = 0.0;
        let mut max_v = f64::NEG_INFINITY;
        let mut max_i = 0;
        for (i, &v) in col.iter().enumerate() {
            if v < -1e-12 {
                return Err(Error::contract(format!(
                    "mixing entry ({i}, {j}) is negative: {v}"
                )));
            }
            sum += v;
            if v > max_v {
                max_v = v;
                max_i = i;
            }
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::contract(format!("mixing column {j} sums to {sum}")));
        }
        if max_v >= 1.0 - 1e-12 && (sum - max_v).abs() <= 1e-12 {
            anchors.push(j);
            covered[max_i] = true;
        }
    }
    if let Some(row) = covered.iter().position(|&c| !c) {
        return Err(Error::contract(format!(
            "mixing matrix has no unit column for row {row}"
        )));
    }
    Ok(anchors)
}

/// Largest mixing weight over non-anchor columns; 0 when every column is
/// an anchor.
fn max_offanchor_weight(h: &DenseMatrix, anchors: &[usize]) -> f64 {
    let mut is_anchor = vec![false; h.cols()];
    for &j in anchors {
        is_anchor[j] = true;
    }
    let mut d = 0.0_f64;
    for j in 0..h.cols() {
        if is_anchor[j] {
            continue;
        }
        for &v in h.col(j) {
            d = d.max(v);
        }
    }
    d
}

fn inflate_mixing_bound(d_h: f64, k: usize) -> f64 {
    let a = 2.0 * (d_h - 0.5).powi(2) + 0.5;
    let b = 2.0 * (0.5 - 1.0 / k as f64).powi(2) + 0.5;
    a.max(b).sqrt()
}

/// Diagnostics for a planted model. `v = None` means noiseless. The β
/// radius degrades to infinity when the model is unidentifiable (zero
/// vertex margin, or mixtures indistinguishable from anchors).
pub fn model_diagnostics(
    w: &DenseMatrix,
    h: &DenseMatrix,
    v: Option<&DenseMatrix>,
    lambda: f64,
) -> Result<TheoryDiagnostics, Error> {
    if w.cols() != h.rows() {
        return Err(Error::contract(format!(
            "W has {} columns but H has {} rows",
            w.cols(),
            h.rows()
        )));
    }
    if let Some(v) = v {
        if v.rows() != w.rows() || v.cols() != h.cols() {
            return Err(Error::contract("noise dimensions do not match W·H"));
        }
    }
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::contract(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    let k = w.cols() as f64;
    let n = h.cols() as f64;

    let gamma = (0..w.cols())
        .map(|j| dot(w.col(j), w.col(j)).sqrt())
        .fold(0.0_f64, f64::max);
    let (delta_bound, noise_sq) = match v {
        Some(v) => {
            let col_norms: Vec<f64> =
                (0..v.cols()).map(|j| dot(v.col(j), v.col(j))).collect();
            let max_sq = col_norms.iter().cloned().fold(0.0_f64, f64::max);
            (max_sq.sqrt(), col_norms.iter().sum::<f64>())
        }
        None => (0.0, 0.0),
    };
    let rho = if noise_sq > 0.0 {
        n * delta_bound * delta_bound / noise_sq
    } else {
        0.0
    };

    let anchors = anchor_columns_of(h)?;
    let d_h = max_offanchor_weight(h, &anchors);
    let alpha_w = vertex_margin(w, &SimplexLsConfig::default())?;
    let numerator =
        (4.0 * rho * (1.0 - k / n) * noise_sq + 2.0 * lambda * k).sqrt() + 2.0 * delta_bound;
    let denominator = alpha_w * (1.0 - d_h);
    let beta = if denominator > 0.0 {
        numerator / denominator
    } else {
        f64::INFINITY
    };
    Ok(TheoryDiagnostics {
        gamma,
        delta_bound,
        d_h,
        alpha_w,
        beta,
        d_prime_h: inflate_mixing_bound(d_h, w.cols()),
    })
}

/// Safety margin of one smoothed-penalty update step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UpdateMargin {
    /// Smallest nonzero gap between values within an anchor row of C
    /// (implicit zeros count). Infinite when anchor rows are constant.
    pub psi: f64,
    /// Positive υ certifies that the penalty keeps reinforcing anchor
    /// rows at this iterate.
    pub upsilon: f64,
}

/// υ = ¼·(λ/N − λ·e^(−ψ/μ) − (d′² + 2d′ + 5)·λmax(WᵀW)/2), with ψ read
/// off the coefficient matrix and the anchor structure read off H.
pub fn update_safety_margin(
    c: &CoefficientMatrix,
    w: &DenseMatrix,
    h: &DenseMatrix,
    lambda: f64,
    mu: f64,
) -> Result<UpdateMargin, Error> {
    if !lambda.is_finite() || lambda < 0.0 || !mu.is_finite() || mu <= 0.0 {
        return Err(Error::contract("need lambda >= 0 and mu > 0"));
    }
    if h.cols() != c.dim() {
        return Err(Error::contract(format!(
            "H has {} columns but C is {}-dimensional",
            h.cols(),
            c.dim()
        )));
    }
    let anchor_cols = anchor_columns_of(h)?;
    let mut psi = f64::INFINITY;
    for &row in &anchor_cols {
        let mut values: Vec<f64> = c.row_entries(row).map(|(_, v)| v).collect();
        if c.row_nnz(row) < c.dim() {
            values.push(0.0);
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        values.dedup();
        for pair in values.windows(2) {
            let gap = pair[1] - pair[0];
            if gap > 0.0 {
                psi = psi.min(gap);
            }
        }
    }
    let d_h = max_offanchor_weight(h, &anchor_cols);
    let dp = inflate_mixing_bound(d_h, h.rows());
    let lam_max = gram_spectral_norm(w);
    let n = c.dim() as f64;
    let upsilon = 0.25
        * (lambda / n
            - lambda * (-psi / mu).exp()
            - (dp * dp + 2.0 * dp + 5.0) * lam_max / 2.0);
    Ok(UpdateMargin { psi, upsilon })
}

/// Outcome of the warm-start regularity test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RegularityCheck {
    pub regular: bool,
    /// Distance to the nearest integer of the closest qualifying pair —
    /// how robustly regular the start is. 0 when not regular.
    pub margin: f64,
}

const REGULARITY_TOL: f64 = 1e-9;

/// A warm start is regular when some pair of distinct values within an
/// anchor row, scaled by t·(t+1)/2, lands away from every integer —
/// exactly the condition under which the schedule can never merge those
/// rows back together. Cost is quadratic in the anchor rows' support
/// sizes; this is a diagnostic, not an inner-loop routine.
pub fn check_init_regularity(
    c: &CoefficientMatrix,
    t_init: usize,
    anchor_rows: &AnchorSet,
) -> Result<RegularityCheck, Error> {
    if let Some(&bad) = anchor_rows.indices().iter().find(|&&r| r >= c.dim()) {
        return Err(Error::contract(format!(
            "anchor row {bad} out of range for dimension {}",
            c.dim()
        )));
    }
    let factor = (t_init * (t_init + 1) / 2) as f64;
    let mut regular = false;
    let mut margin = 0.0_f64;
    for &row in anchor_rows.indices() {
        let mut values: Vec<f64> = c.row_entries(row).map(|(_, v)| v).collect();
        if c.row_nnz(row) < c.dim() {
            values.push(0.0);
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        values.dedup();
        for i in 0..values.len() {
            for j in i + 1..values.len() {
                let d = factor * (values[j] - values[i]);
                let dist = (d - d.round()).abs();
                if dist > REGULARITY_TOL {
                    margin = if regular { margin.min(dist) } else { dist };
                    regular = true;
                }
            }
        }
    }
    Ok(RegularityCheck { regular, margin })
}
