//! Synthetic separable instances, trial records, and benchmark summaries
//!
//! An instance is W·H + noise with the K anchor columns hidden at random
//! positions: W is uniform on [0,1), the non-anchor mixing columns are
//! uniform on the simplex, the noise level is set from a target SNR in
//! dB, and a final column permutation moves the anchors. Generation is
//! keyed by a single seed with fixed sub-streams (0 = W, 1 = mixing,
//! 2 = noise, 3 = permutation), so any one ingredient can be regenerated
//! without replaying the others.

use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::error::Error;
use crate::rng::CounterRng;
use crate::solver::SolveReport;
use crate::spa::AnchorSet;

/// A planted instance: the observed matrix plus everything needed to
/// score a recovery against the truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticInstance {
    pub x: DenseMatrix,
    pub w: DenseMatrix,
    /// Mixing weights in the observed column order.
    pub h: DenseMatrix,
    /// Additive noise actually applied; `None` when σ = 0.
    pub v: Option<DenseMatrix>,
    /// True anchor positions, ascending.
    pub anchors: AnchorSet,
    /// Requested signal-to-noise ratio; `f64::INFINITY` means noiseless.
    pub snr_db: f64,
    /// Noise standard deviation implied by the SNR.
    pub sigma: f64,
    pub seed: u64,
}

const STREAM_W: u64 = 0;
const STREAM_MIX: u64 = 1;
const STREAM_NOISE: u64 = 2;
const STREAM_PERM: u64 = 3;

impl SyntheticInstance {
    /// SNR convention: `snr_db = 10·log₁₀(‖W·H‖²_F / (M·N·σ²))`, solved
    /// for σ. `snr_db = f64::INFINITY` plants no noise at all.
    pub fn generate(
        m: usize,
        k: usize,
        n: usize,
        snr_db: f64,
        seed: u64,
    ) -> Result<Self, Error> {
        if m == 0 || k == 0 || n == 0 {
            return Err(Error::contract("dimensions must be positive"));
        }
        if k > n {
            return Err(Error::contract(format!("{k} anchors cannot hide in {n} columns")));
        }
        if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
            return Err(Error::contract("snrDb must be a real value or +inf"));
        }

        let mut w_data = vec![0.0; m * k];
        CounterRng::new(seed, STREAM_W).fill_uniform(&mut w_data);
        let w = DenseMatrix::from_data(m, k, w_data).expect("finite uniform draws");

        // Mixing in canonical order: anchors first, then simplex points.
        let mut mix_rng = CounterRng::new(seed, STREAM_MIX);
        let mut h0 = DenseMatrix::zeros(k, n);
        for j in 0..k {
            h0.set(j, j, 1.0);
        }
        for j in k..n {
            let weights = mix_rng.simplex_point(k);
            h0.col_mut(j).copy_from_slice(&weights);
        }
        let clean = w.matmul(&h0);

        let sigma = if snr_db == f64::INFINITY {
            0.0
        } else {
            let signal_sq = {
                let f = clean.frobenius_norm();
                f * f
            };
            (signal_sq / ((m * n) as f64 * 10f64.powf(snr_db / 10.0))).sqrt()
        };

        let p = CounterRng::new(seed, STREAM_PERM).permutation(n);
        let h = DenseMatrix::from_fn(k, n, |i, j| h0.get(i, p[j]));
        let mut anchor_positions: Vec<usize> =
            (0..n).filter(|&j| p[j] < k).collect();
        anchor_positions.sort_unstable();
        let anchors = AnchorSet::new(anchor_positions).expect("permutation is injective");

        let (x, v) = if sigma == 0.0 {
            (DenseMatrix::from_fn(m, n, |i, j| clean.get(i, p[j])), None)
        } else {
            // Noise is drawn in the observed (post-permutation) layout.
            let mut noise_rng = CounterRng::new(seed, STREAM_NOISE);
            let mut v = DenseMatrix::zeros(m, n);
            for j in 0..n {
                for vi in v.col_mut(j) {
                    *vi = sigma * noise_rng.gaussian();
                }
            }
            let x = DenseMatrix::from_fn(m, n, |i, j| clean.get(i, p[j]) + v.get(i, j));
            (x, Some(v))
        };

        Ok(Self {
            x,
            w,
            h,
            v,
            anchors,
            snr_db,
            sigma,
            seed,
        })
    }
}

/// Fraction of successful trials.
pub fn success_rate(successes: &[bool]) -> f64 {
    if successes.is_empty() {
        return 0.0;
    }
    successes.iter().filter(|&&s| s).count() as f64 / successes.len() as f64
}

/// One benchmark trial as a JSON-lines row. Field order and formatting
/// are part of the reproducibility contract: two identical runs must
/// produce byte-identical lines. Wall time is opt-in for exactly that
/// reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub m: usize,
    pub k: usize,
    pub n: usize,
    #[serde(with = "snr_db_repr")]
    pub snr_db: f64,
    /// Which method produced the row, e.g. "merit" or "spa".
    pub solver: String,
    pub success: bool,
    pub selected: Vec<usize>,
    pub sweeps_run: usize,
    pub final_rmse: f64,
    pub peak_nonzero_rows: usize,
    pub peak_total_nnz: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

/// JSON has no ∞ literal, so a noiseless run serializes its SNR as the
/// string "inf"; finite values stay numbers.
mod snr_db_repr {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if *v == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    struct SnrVisitor;

    impl Visitor<'_> for SnrVisitor {
        type Value = f64;

        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a number or the string \"inf\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            if v == "inf" {
                Ok(f64::INFINITY)
            } else {
                Err(E::custom(format!("unexpected SNR string {v:?}")))
            }
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(SnrVisitor)
    }
}

/// Records to JSON lines, one compact object per row, trailing newline.
pub fn to_jsonl(records: &[TrialRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

pub fn from_jsonl(text: &str) -> Result<Vec<TrialRecord>, Error> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map_err(|e| Error::parse(i + 1, 1, format!("bad record: {e}")))
        })
        .collect()
}

/// Rank-correlation score between an estimated and a true mixing matrix,
/// maximized over the row matching (estimated anchor order is arbitrary).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SrcReport {
    /// Mean Spearman correlation of matched rows.
    pub src: f64,
    /// `matching[i]` = truth row assigned to estimated row i.
    pub matching: Vec<usize>,
    /// Rows with zero rank variance; they contribute 0 and usually mean
    /// the estimate collapsed.
    pub constant_rows: usize,
}

fn average_ranks(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).expect("finite values"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        // 1-based ranks i+1..=j+1 share their average.
        let avg = (i + j + 2) as f64 / 2.0;
        for &t in &idx[i..=j] {
            ranks[t] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Pearson correlation of average ranks; `None` when either side has no
/// rank variance.
fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    let n = ra.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return None;
    }
    Some(cov / (va * vb).sqrt())
}

/// `est` and `truth` are K×N with rows in unknown relative order. K ≤ 6
/// matches exactly over all row permutations; larger K matches greedily
/// by best remaining pair.
pub fn spearman_src(est: &DenseMatrix, truth: &DenseMatrix) -> Result<SrcReport, Error> {
    let k = est.rows();
    if truth.rows() != k || truth.cols() != est.cols() {
        return Err(Error::contract(format!(
            "shape mismatch: {}×{} vs {}×{}",
            est.rows(),
            est.cols(),
            truth.rows(),
            truth.cols()
        )));
    }
    if k == 0 || est.cols() < 2 {
        return Err(Error::contract("need at least one row and two columns to rank"));
    }

    let est_rows: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..est.cols()).map(|j| est.get(i, j)).collect())
        .collect();
    let truth_rows: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..truth.cols()).map(|j| truth.get(i, j)).collect())
        .collect();

    // rho[i][j] = spearman(est row i, truth row j); constant rows score 0.
    let mut constant = vec![false; k];
    let mut rho = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            match spearman(&est_rows[i], &truth_rows[j]) {
                Some(r) => rho[i][j] = r,
                None => {
                    rho[i][j] = 0.0;
                    constant[i] = true;
                }
            }
        }
    }

    let matching = if k <= 6 {
        best_matching_exact(&rho)
    } else {
        best_matching_greedy(&rho)
    };
    let src = matching
        .iter()
        .enumerate()
        .map(|(i, &j)| rho[i][j])
        .sum::<f64>()
        / k as f64;
    // A constant estimated row is flagged regardless of where it matched.
    let constant_rows = constant.iter().filter(|&&c| c).count();
    Ok(SrcReport {
        src,
        matching,
        constant_rows,
    })
}

fn best_matching_exact(rho: &[Vec<f64>]) -> Vec<usize> {
    let k = rho.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best_perm = perm.clone();
    let mut best = f64::NEG_INFINITY;
    permute(&mut perm, 0, &mut |p| {
        let score: f64 = p.iter().enumerate().map(|(i, &j)| rho[i][j]).sum();
        if score > best {
            best = score;
            best_perm = p.to_vec();
        }
    });
    best_perm
}

fn permute(p: &mut Vec<usize>, at: usize, visit: &mut impl FnMut(&[usize])) {
    if at == p.len() {
        visit(p);
        return;
    }
    for i in at..p.len() {
        p.swap(at, i);
        permute(p, at + 1, visit);
        p.swap(at, i);
    }
}

fn best_matching_greedy(rho: &[Vec<f64>]) -> Vec<usize> {
    let k = rho.len();
    let mut used_est = vec![false; k];
    let mut used_truth = vec![false; k];
    let mut matching = vec![0; k];
    for _ in 0..k {
        let mut best = f64::NEG_INFINITY;
        let mut pick = (0, 0);
        for i in 0..k {
            if used_est[i] {
                continue;
            }
            for j in 0..k {
                if used_truth[j] {
                    continue;
                }
                if rho[i][j] > best {
                    best = rho[i][j];
                    pick = (i, j);
                }
            }
        }
        used_est[pick.0] = true;
        used_truth[pick.1] = true;
        matching[pick.0] = pick.1;
    }
    matching
}

/// Peak-memory verdict for one solve at problem size (K, N).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MemorySummary {
    pub peak_total_nnz: usize,
    pub peak_nonzero_rows: usize,
    /// peakTotalNnz / (K·N) — 1.0 means the iterate never exceeded one
    /// ideal anchor row set.
    pub ratio: f64,
    /// Whether the ratio stayed at or under the requested bound.
    pub linear: bool,
}

pub fn memory_summary(report: &SolveReport, k: usize, n: usize, bound: f64) -> MemorySummary {
    let ratio = report.peak_total_nnz as f64 / (k * n) as f64;
    MemorySummary {
        peak_total_nnz: report.peak_total_nnz,
        peak_nonzero_rows: report.peak_nonzero_rows,
        ratio,
        linear: ratio <= bound,
    }
}
