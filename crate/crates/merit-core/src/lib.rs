//! Self-dictionary simplex-constrained factorization with linear-memory
//! Frank-Wolfe updates.
//!
//! The central problem: given a data matrix `X` (M×N) whose columns are
//! convex combinations of a few unknown "anchor" columns hiding inside `X`
//! itself, fit `X ≈ X·C` with every column of `C` on the probability simplex
//! and read the anchors off the largest rows of `C`. The solver only ever
//! touches one column of `C` at a time and stores `C` sparsely, so working
//! memory tracks the support actually visited — Θ(K·N) in the separable
//! regime — instead of the Θ(N²) a dense coefficient matrix would cost.
//!
//! Module map:
//!
//! * [`dense`] / [`coeff`] — dense column-major storage and the sparse
//!   simplex-column store with exact per-row aggregates.
//! * [`regularizer`] — smoothed row-max (log-sum-exp) penalty that pushes
//!   mass onto few rows without breaking per-column separability.
//! * [`solver`] — the per-column Frank-Wolfe sweep engine.
//! * [`spa`] — successive projection baseline and warm starts.
//! * [`selection`] — anchor extraction and recovery-condition diagnostics.
//! * [`estimator`] — simplex-constrained least squares and full-matrix
//!   weight recovery.
//! * [`rng`] / [`synth`] — reproducible counter-based sampling and the
//!   synthetic benchmark harness.
//! * [`embed`] — symmetric eigen-embedding for adjacency inputs.
//! * [`community`] — end-to-end graph membership evaluation pipeline.

pub mod coeff;
pub mod community;
pub mod dense;
pub mod embed;
pub mod error;
pub mod estimator;
pub mod io;
pub mod regularizer;
pub mod rng;
pub mod selection;
pub mod solver;
pub mod spa;
pub mod synth;


pub use coeff::{
    fit_rmse, residual_gradient_column, CoefficientMatrix, SparseSimplexColumn,
    FEASIBILITY_TOL, PURGE_THRESHOLD,
};
pub use community::{community_eval, CommunityEvalConfig, CommunityEvalReport};
pub use dense::DenseMatrix;
pub use embed::{energy_filter, reduce_rows, top_eigenpairs, EigenPairs, SymmetricMatrix};
pub use error::Error;
pub use rng::{mix64, trial_seed, CounterRng};
pub use estimator::{estimate_h, simplex_ls, SimplexLsConfig};
pub use regularizer::{smoothed_max, smoothed_row_norm_sum, RowSoftmaxState, SmoothingParams};
pub use selection::{
    anchor_norm_floor, check_init_regularity, gram_spectral_norm, model_diagnostics,
    select_anchors, update_safety_margin, vertex_margin, AnchorSelection, RegularityCheck,
    TheoryDiagnostics, UpdateMargin,
};
pub use solver::{select_vertex, solve, FwSolver, SolveConfig, SolveReport, SweepStats};
pub use spa::{
    build_warm_start, spa_select, spa_select_with_residual, warm_start_schedule_offset,
    AnchorSet, SpaResult, MAX_SCHEDULE_OFFSET,
};
pub use synth::{
    from_jsonl, memory_summary, spearman_src, success_rate, to_jsonl, MemorySummary,
    SrcReport, SyntheticInstance, TrialRecord,
};
