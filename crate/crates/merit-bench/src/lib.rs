//! Deterministic fixtures for the benchmark suite. Sizes here are tuned for
//! timing, not statistics: one mid-size instance per shape, fixed seeds so
//! successive `cargo bench` runs time the same work.

use merit_core::{
    trial_seed, CoefficientMatrix, CounterRng, DenseMatrix, SparseSimplexColumn, SymmetricMatrix,
    SyntheticInstance,
};

const FIXTURE_MASTER_SEED: u64 = 77;

/// Separable instance at the benchmark shape (M = 50, K = 40) with 10 dB
/// noise, keyed by column count.
pub fn synthetic(n: usize) -> SyntheticInstance {
    SyntheticInstance::generate(50, 40, n, 10.0, trial_seed(FIXTURE_MASTER_SEED, n as u64))
        .expect("fixture shape is valid")
}

/// Coefficient matrix with `nnz_per_col` uniformly weighted entries per
/// column, for penalty-snapshot timing.
pub fn sparse_coefficients(n: usize, nnz_per_col: usize) -> CoefficientMatrix {
    let mut rng = CounterRng::new(trial_seed(FIXTURE_MASTER_SEED, 1), 0);
    let columns = (0..n)
        .map(|_| {
            let rows = rng.permutation(n);
            let entries = rows[..nnz_per_col]
                .iter()
                .map(|&i| (i, 1.0 / nnz_per_col as f64))
                .collect();
            SparseSimplexColumn::from_entries(n, entries).expect("uniform weights are feasible")
        })
        .collect();
    CoefficientMatrix::from_columns(columns).expect("square by construction")
}

/// Mixed-membership block adjacency with `k` planted communities over
/// `nodes` nodes (first `k` nodes pure), plus its ground-truth memberships.
pub fn planted_adjacency(nodes: usize, k: usize) -> (SymmetricMatrix, DenseMatrix) {
    let mut rng = CounterRng::new(trial_seed(FIXTURE_MASTER_SEED, 2), 0);
    let mut h = DenseMatrix::zeros(k, nodes);
    for j in 0..nodes {
        if j < k {
            h.set(j, j, 1.0);
        } else {
            let weights = rng.simplex_point(k);
            for (i, w) in weights.iter().enumerate() {
                h.set(i, j, *w);
            }
        }
    }
    let adj = SymmetricMatrix::from_fn(nodes, |i, j| {
        let mut s = 0.0;
        for p in 0..k {
            for q in 0..k {
                let b = if p == q { 1.0 } else { 0.3 };
                s += h.get(p, i) * b * h.get(q, j);
            }
        }
        s
    });
    (adj, h)
}
