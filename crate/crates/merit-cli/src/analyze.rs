//! Analysis surfaces: `diagnostics` (recovery-condition constants for a
//! known factorization) and `community-eval` (adjacency → membership SRC).

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use merit_core::{
    community_eval, model_diagnostics, CommunityEvalConfig, Error, SimplexLsConfig, SolveConfig,
};

use crate::io_util;

#[derive(Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DiagnosticsArgs {
    /// Anchor basis W (M×K).
    #[arg(long)]
    pub w: PathBuf,
    /// Weights H (K×N) with an identity block on the anchor columns.
    #[arg(long)]
    pub h: PathBuf,
    /// Optional noise matrix V (M×N).
    #[arg(long)]
    pub v: Option<PathBuf>,
    /// Penalty weight the bound is evaluated at.
    #[arg(long, default_value_t = 1e-6)]
    pub lambda: f64,
    /// JSON destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_diagnostics(args: &DiagnosticsArgs) -> Result<i32, Error> {
    let w = io_util::load_dense(&args.w)?;
    let h = io_util::load_dense(&args.h)?;
    let v = match &args.v {
        Some(path) => Some(io_util::load_dense(path)?),
        None => None,
    };
    let diag = model_diagnostics(&w, &h, v.as_ref(), args.lambda)?;
    let json = serde_json::to_string_pretty(&serde_json::json!({
        "config": args,
        "diagnostics": diag,
    }))
    .expect("diagnostics serialize");
    emit(args.out.as_deref(), &json)?;
    Ok(0)
}

#[derive(Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CommunityEvalArgs {
    /// Symmetric adjacency matrix (dense CSV or Matrix Market array).
    #[arg(long)]
    pub adjacency: PathBuf,
    /// Ground-truth membership matrix H (K×N).
    #[arg(long)]
    pub truth: PathBuf,
    /// Community count K.
    #[arg(long)]
    pub k: usize,
    /// Embedded-energy fraction of nodes to keep before solving.
    #[arg(long, default_value_t = 0.99)]
    pub energy_fraction: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub eig_tol: f64,
    #[arg(long, default_value_t = 1000)]
    pub eig_max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1e-5)]
    pub mu: f64,
    #[arg(long, default_value_t = 500)]
    pub max_sweeps: usize,
    /// Exit 4 when the eigensolver exhausts its budget unconverged.
    #[arg(long, default_value_t = false)]
    pub strict_eig: bool,
    /// JSON destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_community_eval(args: &CommunityEvalArgs) -> Result<i32, Error> {
    let adj = io_util::load_symmetric(&args.adjacency)?;
    let truth = io_util::load_dense(&args.truth)?;
    let cfg = CommunityEvalConfig {
        k: args.k,
        energy_fraction: args.energy_fraction,
        eig_tol: args.eig_tol,
        eig_max_iters: args.eig_max_iters,
        solve: SolveConfig {
            lambda: args.lambda,
            mu: args.mu,
            max_sweeps: args.max_sweeps,
            ..SolveConfig::default()
        },
        estimator: SimplexLsConfig::default(),
    };
    let report = community_eval(&adj, &truth, &cfg)?;
    let json = serde_json::to_string_pretty(&serde_json::json!({
        "config": args,
        "src": report.src.src,
        "k": report.k,
        "nodesKept": report.nodes_kept,
        "report": report,
    }))
    .expect("report serializes");
    emit(args.out.as_deref(), &json)?;
    if args.strict_eig && !report.eig_converged {
        return Ok(4);
    }
    Ok(0)
}

fn emit(out: Option<&std::path::Path>, body: &str) -> Result<(), Error> {
    match out {
        Some(path) => io_util::atomic_write(path, &format!("{body}\n")),
        None => {
            println!("{body}");
            Ok(())
        }
    }
}
