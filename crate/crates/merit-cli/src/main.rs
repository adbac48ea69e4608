//! `merit` — command-line front end for the sweep solver, the greedy
//! baseline, synthetic benchmarks, and the community pipeline.
//!
//! Exit codes: 0 success; 2 malformed input text (with line/column); 3
//! structurally valid but infeasible input (bad column sums, negative
//! weights); 4 a convergence requirement requested by flag was not met;
//! 1 anything else. `MERIT_THREADS` caps internal parallelism (0 = serial);
//! unset leaves the default pool.

mod analyze;
mod io_util;
mod solve_cmd;
mod sweep;

use clap::{Parser, Subcommand};
use merit_core::Error;

#[derive(Parser)]
#[command(
    name = "merit",
    version,
    about = "Linear-memory self-dictionary factorization toolkit",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Benchmark solvers over an SNR grid of synthetic instances
    SynthSweep(sweep::SynthSweepArgs),
    /// Run the sweep solver on a data matrix
    Solve(solve_cmd::SolveArgs),
    /// Pick the top-k anchor rows from a coefficient matrix
    SelectAnchors(solve_cmd::SelectAnchorsArgs),
    /// Simplex least-squares mixing weights for fixed anchors
    EstimateH(solve_cmd::EstimateHArgs),
    /// Identifiability diagnostics for a planted factorization
    Diagnostics(analyze::DiagnosticsArgs),
    /// Spectral embedding + solver pipeline scored against planted communities
    CommunityEval(analyze::CommunityEvalArgs),
    /// Peak working-set accounting across a grid of problem widths
    MemorySweep(sweep::MemorySweepArgs),
}

fn main() {
    if let Err(e) = io_util::init_thread_pool() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::SynthSweep(a) => sweep::run_synth_sweep(&a),
        Command::Solve(a) => solve_cmd::run_solve(&a),
        Command::SelectAnchors(a) => solve_cmd::run_select_anchors(&a),
        Command::EstimateH(a) => solve_cmd::run_estimate_h(&a),
        Command::Diagnostics(a) => analyze::run_diagnostics(&a),
        Command::CommunityEval(a) => analyze::run_community_eval(&a),
        Command::MemorySweep(a) => sweep::run_memory_sweep(&a),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } => 2,
        Error::Infeasible(_) => 3,
        _ => 1,
    }
}
