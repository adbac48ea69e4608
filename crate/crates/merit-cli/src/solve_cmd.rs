//! Single-matrix entry points: `solve`, `select-anchors`, `estimate-h`.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use merit_core::io::{write_coefficient_mm, write_dense_csv};
use merit_core::{
    build_warm_start, estimate_h, fit_rmse, select_anchors, solve, spa_select,
    warm_start_schedule_offset, AnchorSet, CoefficientMatrix, Error, SimplexLsConfig, SolveConfig,
    SolveReport,
};

use crate::io_util;

#[derive(Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveArgs {
    /// Data matrix X: CSV, or Matrix Market array for `.mtx`/`.mm`.
    #[arg(long)]
    pub input: PathBuf,
    /// Row-sparsity weight λ.
    #[arg(long, default_value_t = 1e-6)]
    pub lambda: f64,
    /// Softmax temperature μ.
    #[arg(long, default_value_t = 1e-5)]
    pub mu: f64,
    /// Hard sweep budget.
    #[arg(long, default_value_t = 500)]
    pub max_sweeps: usize,
    /// Per-column residual freeze threshold; 0 disables the stop.
    #[arg(long, default_value_t = 0.0)]
    pub tol: f64,
    /// `zero`, `spa`, or `file:<path>` (Matrix Market coefficient file).
    #[arg(long, default_value = "zero")]
    pub warm_start: String,
    /// Anchor count: required for `--warm-start spa`, and switches on the
    /// anchor listing in the report.
    #[arg(long)]
    pub k: Option<usize>,
    /// Echoed into the report for provenance; the solve itself draws no
    /// randomness.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Destination for the coefficient matrix (Matrix Market coordinate).
    #[arg(long)]
    pub out_c: Option<PathBuf>,
    /// Destination for the JSON run report; stdout when omitted.
    #[arg(long)]
    pub out_report: Option<PathBuf>,
    /// Exit 4 when the final fit RMSE stays above this after the budget.
    #[arg(long)]
    pub fail_rmse_above: Option<f64>,
    /// Record wall-clock time in the report. Off by default so that two
    /// identical runs produce byte-identical artifacts.
    #[arg(long, default_value_t = false)]
    pub timings: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SolveArtifact<'a> {
    config: &'a SolveArgs,
    t_init: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    anchors: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    underfilled: Option<bool>,
    report: &'a SolveReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_ms: Option<u64>,
}

enum WarmStart {
    Zero,
    Spa,
    File(PathBuf),
}

fn parse_warm_start(raw: &str) -> Result<WarmStart, Error> {
    match raw {
        "zero" => Ok(WarmStart::Zero),
        "spa" => Ok(WarmStart::Spa),
        other => match other.strip_prefix("file:") {
            Some(path) if !path.is_empty() => Ok(WarmStart::File(PathBuf::from(path))),
            _ => Err(Error::Contract(format!(
                "--warm-start must be zero, spa, or file:<path>, got {raw:?}"
            ))),
        },
    }
}

pub fn run_solve(args: &SolveArgs) -> Result<i32, Error> {
    let x = io_util::load_dense(&args.input)?;
    let started = std::time::Instant::now();

    let init: Option<CoefficientMatrix> = match parse_warm_start(&args.warm_start)? {
        WarmStart::Zero => None,
        WarmStart::Spa => {
            let k = args.k.ok_or_else(|| {
                Error::Contract("--warm-start spa needs --k".to_string())
            })?;
            let picks = spa_select(&x, k)?;
            Some(build_warm_start(&x, &picks.anchors, &SimplexLsConfig::default())?)
        }
        WarmStart::File(path) => Some(io_util::load_coefficients(&path)?),
    };
    let t_init = match &init {
        Some(c) => {
            if c.dim() != x.cols() {
                return Err(Error::Contract(format!(
                    "warm start is {}-dimensional, data has {} columns",
                    c.dim(),
                    x.cols()
                )));
            }
            warm_start_schedule_offset(fit_rmse(&x, c))
        }
        None => 0,
    };

    let cfg = SolveConfig {
        lambda: args.lambda,
        mu: args.mu,
        max_sweeps: args.max_sweeps,
        t_init,
        per_column_tol: args.tol,
    };
    let (c, report) = solve(&x, &cfg, init)?;

    let (anchors, underfilled) = match args.k {
        Some(k) => {
            let sel = select_anchors(&c, k)?;
            (Some(sel.anchors.sorted()), Some(sel.underfilled))
        }
        None => (None, None),
    };

    if let Some(path) = &args.out_c {
        io_util::atomic_write(path, &write_coefficient_mm(&c))?;
    }
    let artifact = SolveArtifact {
        config: args,
        t_init,
        anchors,
        underfilled,
        report: &report,
        wall_time_ms: args.timings.then(|| started.elapsed().as_millis() as u64),
    };
    let json = serde_json::to_string_pretty(&artifact).expect("report serializes");
    match &args.out_report {
        Some(path) => {
            io_util::atomic_write(path, &format!("{json}\n"))?;
            println!(
                "solve: rmse {:.6e}, {} sweeps, peak nnz {}",
                report.final_rmse, report.sweeps_run, report.peak_total_nnz
            );
        }
        None => println!("{json}"),
    }

    match args.fail_rmse_above {
        Some(bound) if report.final_rmse > bound => Ok(4),
        _ => Ok(0),
    }
}

#[derive(Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SelectAnchorsArgs {
    /// Coefficient matrix C (Matrix Market coordinate).
    #[arg(long)]
    pub input_c: PathBuf,
    /// Number of anchors to extract.
    #[arg(long)]
    pub k: usize,
    /// JSON destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_select_anchors(args: &SelectAnchorsArgs) -> Result<i32, Error> {
    let c = io_util::load_coefficients(&args.input_c)?;
    let sel = select_anchors(&c, args.k)?;
    let json = serde_json::to_string_pretty(&serde_json::json!({
        "config": args,
        "anchors": sel.anchors.sorted(),
        "underfilled": sel.underfilled,
    }))
    .expect("selection serializes");
    emit(args.out.as_deref(), &json)?;
    Ok(0)
}

#[derive(Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EstimateHArgs {
    /// Data matrix X.
    #[arg(long)]
    pub input: PathBuf,
    /// Anchor column indices, comma-separated (e.g. `0,4,17`).
    #[arg(long)]
    pub anchors: String,
    #[arg(long, default_value_t = 1000)]
    pub ls_max_iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub ls_tol: f64,
    /// CSV destination for the K×N weight matrix; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_estimate_h(args: &EstimateHArgs) -> Result<i32, Error> {
    let x = io_util::load_dense(&args.input)?;
    let anchors = AnchorSet::new(io_util::parse_usize_list(&args.anchors)?)?;
    let cfg = SimplexLsConfig { max_iters: args.ls_max_iters, tol: args.ls_tol };
    let h = estimate_h(&x, &anchors, &cfg)?;
    let body = format!("{}{}", io_util::config_comment(args), write_dense_csv(&h));
    emit(args.out.as_deref(), body.trim_end())?;
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
