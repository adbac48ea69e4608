//! Benchmark surfaces: `synth-sweep` (success rates over an SNR/N grid) and
//! `memory-sweep` (working-set growth over N).

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use merit_core::{
    memory_summary, select_anchors, solve, spa_select_with_residual, to_jsonl, trial_seed,
    AnchorSet, Error, SolveConfig, SyntheticInstance, TrialRecord,
};

use crate::io_util;

#[derive(Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SynthSweepArgs {
    /// Ambient dimension M.
    #[arg(long, default_value_t = 50)]
    pub m: usize,
    /// Anchor count K.
    #[arg(long, default_value_t = 40)]
    pub k: usize,
    /// Comma-separated grid of column counts N.
    #[arg(long, default_value = "200")]
    pub n: String,
    /// Comma-separated SNR grid in dB; `inf` means noiseless.
    #[arg(long, default_value = "inf")]
    pub snr_db: String,
    /// Trials per grid cell.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Comma-separated subset of {merit, merit0, spa}; merit0 runs the
    /// solver with the penalty off.
    #[arg(long, default_value = "merit,spa")]
    pub solvers: String,
    /// Master seed. Mandatory — replays must be exact, so there is no
    /// wall-clock default.
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1e-5)]
    pub mu: f64,
    #[arg(long, default_value_t = 500)]
    pub max_sweeps: usize,
    /// Per-trial JSON-lines destination (first line echoes the config).
    #[arg(long)]
    pub out_jsonl: Option<PathBuf>,
    /// Aggregate CSV destination; stdout when omitted.
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    /// Record per-trial wall-clock time. Off by default so that two
    /// identical runs produce byte-identical artifacts.
    #[arg(long, default_value_t = false)]
    pub timings: bool,
}

#[derive(Clone, Copy, PartialEq)]
enum Solver {
    Merit,
    Merit0,
    Spa,
}

impl Solver {
    fn name(self) -> &'static str {
        match self {
            Solver::Merit => "merit",
            Solver::Merit0 => "merit0",
            Solver::Spa => "spa",
        }
    }
}

fn parse_solvers(raw: &str) -> Result<Vec<Solver>, Error> {
    raw.split(',')
        .map(|tok| match tok.trim() {
            "merit" => Ok(Solver::Merit),
            "merit0" => Ok(Solver::Merit0),
            "spa" => Ok(Solver::Spa),
            other => Err(Error::Contract(format!(
                "unknown solver {other:?}; choose from merit, merit0, spa"
            ))),
        })
        .collect()
}

fn fmt_snr(snr: f64) -> String {
    if snr.is_infinite() { "inf".to_string() } else { format!("{snr}") }
}

fn base_record(
    trial: usize,
    seed: u64,
    inst: &SyntheticInstance,
    solver: &str,
    selected: &AnchorSet,
) -> TrialRecord {
    TrialRecord {
        trial,
        seed,
        m: inst.x.rows(),
        k: inst.anchors.len(),
        n: inst.x.cols(),
        snr_db: inst.snr_db,
        solver: solver.to_string(),
        success: selected.same_set(&inst.anchors),
        selected: selected.sorted(),
        sweeps_run: 0,
        final_rmse: 0.0,
        peak_nonzero_rows: 0,
        peak_total_nnz: 0,
        wall_time_ms: None,
    }
}

/// One solver on one instance. `Err` means this row failed; the sweep
/// reports it and moves on.
fn run_trial(
    solver: Solver,
    inst: &SyntheticInstance,
    trial: usize,
    seed: u64,
    cfg: &SolveConfig,
    timings: bool,
) -> Result<TrialRecord, Error> {
    let k = inst.anchors.len();
    let started = std::time::Instant::now();
    let mut rec = match solver {
        Solver::Spa => {
            let (picks, resid) = spa_select_with_residual(&inst.x, k)?;
            let rmse = (resid.frobenius_norm().powi(2) / inst.x.cols() as f64).sqrt();
            let mut rec = base_record(trial, seed, inst, solver.name(), &picks.anchors);
            rec.final_rmse = rmse;
            // SPA's working state is the pick list itself.
            rec.peak_nonzero_rows = picks.anchors.len();
            rec.peak_total_nnz = picks.anchors.len();
            rec
        }
        Solver::Merit | Solver::Merit0 => {
            let cfg = SolveConfig {
                lambda: if solver == Solver::Merit0 { 0.0 } else { cfg.lambda },
                ..cfg.clone()
            };
            let (c, report) = solve(&inst.x, &cfg, None)?;
            let sel = select_anchors(&c, k)?;
            let mut rec = base_record(trial, seed, inst, solver.name(), &sel.anchors);
            rec.sweeps_run = report.sweeps_run;
            rec.final_rmse = report.final_rmse;
            rec.peak_nonzero_rows = report.peak_nonzero_rows;
            rec.peak_total_nnz = report.peak_total_nnz;
            rec
        }
    };
    rec.wall_time_ms = timings.then(|| started.elapsed().as_millis() as u64);
    Ok(rec)
}

pub fn run_synth_sweep(args: &SynthSweepArgs) -> Result<i32, Error> {
    let snrs = io_util::parse_snr_list(&args.snr_db)?;
    let ns = io_util::parse_usize_list(&args.n)?;
    let solvers = parse_solvers(&args.solvers)?;
    if args.trials == 0 {
        return Err(Error::Contract("--trials must be positive".to_string()));
    }
    let cfg = SolveConfig {
        lambda: args.lambda,
        mu: args.mu,
        max_sweeps: args.max_sweeps,
        ..SolveConfig::default()
    };

    let mut records: Vec<TrialRecord> = Vec::new();
    let mut failures = 0usize;
    // successes[cell][solver], cells in (snr, n) row-major order.
    let mut tallies = vec![vec![(0usize, 0usize, 0.0f64); solvers.len()]; snrs.len() * ns.len()];

    for (si, &snr) in snrs.iter().enumerate() {
        for (ni, &n) in ns.iter().enumerate() {
            let cell = si * ns.len() + ni;
            for trial in 0..args.trials {
                let seed = trial_seed(args.seed, (cell * args.trials + trial) as u64);
                let inst = match SyntheticInstance::generate(args.m, args.k, n, snr, seed) {
                    Ok(inst) => inst,
                    Err(e) => {
                        eprintln!("warning: trial {trial} at snr {} n {n} skipped: {e}", fmt_snr(snr));
                        failures += 1;
                        continue;
                    }
                };
                for (vi, &solver) in solvers.iter().enumerate() {
                    match run_trial(solver, &inst, trial, seed, &cfg, args.timings) {
                        Ok(rec) => {
                            let slot = &mut tallies[cell][vi];
                            slot.0 += rec.success as usize;
                            slot.1 += 1;
                            slot.2 += rec.peak_total_nnz as f64 / (args.k * n) as f64;
                            records.push(rec);
                        }
                        Err(e) => {
                            eprintln!(
                                "warning: {} trial {trial} at snr {} n {n} failed: {e}",
                                solver.name(),
                                fmt_snr(snr)
                            );
                            failures += 1;
                        }
                    }
                }
            }
        }
    }

    let mut csv = io_util::config_comment(args);
    csv.push_str("snrDb,n,solver,successRate,meanPeakNnzRatio\n");
    for (si, &snr) in snrs.iter().enumerate() {
        for (ni, &n) in ns.iter().enumerate() {
            for (vi, &solver) in solvers.iter().enumerate() {
                let (wins, done, ratio_sum) = tallies[si * ns.len() + ni][vi];
                if done == 0 {
                    continue;
                }
                let _ = writeln!(
                    csv,
                    "{},{},{},{:.6},{:.6}",
                    fmt_snr(snr),
                    n,
                    solver.name(),
                    wins as f64 / done as f64,
                    ratio_sum / done as f64,
                );
            }
        }
    }

    if let Some(path) = &args.out_jsonl {
        let body = format!("{}{}", io_util::config_line(args), to_jsonl(&records));
        io_util::atomic_write(path, &body)?;
    }
    match &args.out_csv {
        Some(path) => {
            io_util::atomic_write(path, &csv)?;
            println!(
                "synth-sweep: {} rows over {} cells, {} failures",
                records.len(),
                snrs.len() * ns.len(),
                failures
            );
        }
        None => print!("{csv}"),
    }
    Ok(0)
}

#[derive(Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MemorySweepArgs {
    /// Ambient dimension M.
    #[arg(long, default_value_t = 50)]
    pub m: usize,
    /// Anchor count K.
    #[arg(long, default_value_t = 40)]
    pub k: usize,
    /// Comma-separated grid of column counts, e.g. `200,1000,5000`.
    #[arg(long)]
    pub n_list: String,
    /// SNR in dB; `inf` means noiseless.
    #[arg(long, default_value = "10")]
    pub snr_db: String,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    /// Master seed (mandatory, as in synth-sweep).
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1e-5)]
    pub mu: f64,
    #[arg(long, default_value_t = 50)]
    pub max_sweeps: usize,
    /// Declared bound on peakTotalNnz/(K·N); rows report whether every
    /// trial stayed under it.
    #[arg(long, default_value_t = 2.0)]
    pub bound: f64,
    /// Per-trial JSON-lines destination.
    #[arg(long)]
    pub out_jsonl: Option<PathBuf>,
    /// Aggregate CSV destination; stdout when omitted.
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    /// Record per-trial wall-clock time (see synth-sweep).
    #[arg(long, default_value_t = false)]
    pub timings: bool,
}

pub fn run_memory_sweep(args: &MemorySweepArgs) -> Result<i32, Error> {
    let snrs = io_util::parse_snr_list(&args.snr_db)?;
    let [snr] = snrs[..] else {
        return Err(Error::Contract("memory-sweep takes a single --snr-db".to_string()));
    };
    let ns = io_util::parse_usize_list(&args.n_list)?;
    if args.trials == 0 {
        return Err(Error::Contract("--trials must be positive".to_string()));
    }
    let cfg = SolveConfig {
        lambda: args.lambda,
        mu: args.mu,
        max_sweeps: args.max_sweeps,
        ..SolveConfig::default()
    };

    let mut records: Vec<TrialRecord> = Vec::new();
    let mut csv = io_util::config_comment(args);
    csv.push_str("n,trials,meanPeakTotalNnz,meanRatio,maxRatio,allLinear\n");
    let mut failures = 0usize;

    for (ni, &n) in ns.iter().enumerate() {
        let mut nnz_sum = 0.0f64;
        let mut ratio_sum = 0.0f64;
        let mut ratio_max = 0.0f64;
        let mut all_linear = true;
        let mut done = 0usize;
        for trial in 0..args.trials {
            let seed = trial_seed(args.seed, (ni * args.trials + trial) as u64);
            let row = SyntheticInstance::generate(args.m, args.k, n, snr, seed)
                .and_then(|inst| {
                    let started = std::time::Instant::now();
                    let (c, report) = solve(&inst.x, &cfg, None)?;
                    let sel = select_anchors(&c, args.k)?;
                    let mut rec = base_record(trial, seed, &inst, "merit", &sel.anchors);
                    rec.sweeps_run = report.sweeps_run;
                    rec.final_rmse = report.final_rmse;
                    rec.peak_nonzero_rows = report.peak_nonzero_rows;
                    rec.peak_total_nnz = report.peak_total_nnz;
                    rec.wall_time_ms = args.timings.then(|| started.elapsed().as_millis() as u64);
                    Ok((rec, memory_summary(&report, args.k, n, args.bound)))
                });
            match row {
                Ok((rec, summary)) => {
                    nnz_sum += summary.peak_total_nnz as f64;
                    ratio_sum += summary.ratio;
                    ratio_max = ratio_max.max(summary.ratio);
                    all_linear &= summary.linear;
                    done += 1;
                    records.push(rec);
                }
                Err(e) => {
                    eprintln!("warning: trial {trial} at n {n} failed: {e}");
                    failures += 1;
                }
            }
        }
        if done > 0 {
            let _ = writeln!(
                csv,
                "{},{},{:.1},{:.6},{:.6},{}",
                n,
                done,
                nnz_sum / done as f64,
                ratio_sum / done as f64,
                ratio_max,
                all_linear,
            );
        }
    }

    if let Some(path) = &args.out_jsonl {
        let body = format!("{}{}", io_util::config_line(args), to_jsonl(&records));
        io_util::atomic_write(path, &body)?;
    }
    match &args.out_csv {
        Some(path) => {
            io_util::atomic_write(path, &csv)?;
            println!(
                "memory-sweep: {} rows over {} widths, {} failures",
                records.len(),
                ns.len(),
                failures
            );
        }
        None => print!("{csv}"),
    }
    Ok(0)
}
