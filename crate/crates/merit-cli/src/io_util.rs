//! File plumbing shared by the subcommands: format detection by extension,
//! atomic writes, and the configuration echo every artifact carries.

use std::path::Path;

use merit_core::io::{parse_coefficient_mm, parse_dense_csv, parse_mm_dense};
use merit_core::{CoefficientMatrix, DenseMatrix, Error, SymmetricMatrix};

/// Dense matrix from CSV, or Matrix Market array when the extension is
/// `.mtx`/`.mm`.
pub fn load_dense(path: &Path) -> Result<DenseMatrix, Error> {
    let text = std::fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("mtx") | Some("mm") => parse_mm_dense(&text),
        _ => parse_dense_csv(&text),
    }
}

pub fn load_coefficients(path: &Path) -> Result<CoefficientMatrix, Error> {
    let text = std::fs::read_to_string(path)?;
    parse_coefficient_mm(&text)
}

/// Symmetric matrix from a dense file; asymmetry beyond roundoff is a
/// feasibility error, not a parse error.
pub fn load_symmetric(path: &Path) -> Result<SymmetricMatrix, Error> {
    let dense = load_dense(path)?;
    if dense.rows() != dense.cols() {
        return Err(Error::Infeasible(format!(
            "adjacency must be square, got {}×{}",
            dense.rows(),
            dense.cols()
        )));
    }
    let n = dense.rows();
    for i in 0..n {
        for j in i + 1..n {
            if (dense.get(i, j) - dense.get(j, i)).abs() > 1e-12 {
                return Err(Error::Infeasible(format!(
                    "adjacency not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(SymmetricMatrix::from_fn(n, |i, j| dense.get(i, j)))
}

/// Write through a sibling temp file and rename, so readers never observe a
/// half-written artifact.
pub fn atomic_write(path: &Path, contents: &str) -> Result<(), Error> {
    let tmp = path.with_extension(match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{ext}.tmp"),
        None => "tmp".to_string(),
    });
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Effective-configuration echo as the first JSON-lines row.
pub fn config_line<T: serde::Serialize>(args: &T) -> String {
    let value = serde_json::json!({ "config": args });
    format!("{value}\n")
}

/// Effective-configuration echo as a CSV comment header.
pub fn config_comment<T: serde::Serialize>(args: &T) -> String {
    let value = serde_json::to_string(args).expect("args serialize");
    format!("# config: {value}\n")
}

/// Apply `MERIT_THREADS` before any parallel work: 0 and 1 both mean
/// serial; larger values cap the pool. Unset keeps the library default.
pub fn init_thread_pool() -> Result<(), String> {
    let Ok(raw) = std::env::var("MERIT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("MERIT_THREADS must be a nonnegative integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n.max(1))
        .build_global()
        .map_err(|e| format!("thread pool: {e}"))
}

/// Comma-separated SNR list; `inf` (any case) means noiseless.
pub fn parse_snr_list(raw: &str) -> Result<Vec<f64>, Error> {
    raw.split(',')
        .enumerate()
        .map(|(i, tok)| {
            let tok = tok.trim();
            if tok.eq_ignore_ascii_case("inf") {
                return Ok(f64::INFINITY);
            }
            tok.parse::<f64>().map_err(|_| {
                Error::Parse {
                    line: 1,
                    col: i + 1,
                    msg: format!("bad SNR value {tok:?}"),
                }
            })
        })
        .collect()
}

/// Comma-separated ascending positive widths.
pub fn parse_usize_list(raw: &str) -> Result<Vec<usize>, Error> {
    raw.split(',')
        .enumerate()
        .map(|(i, tok)| {
            tok.trim().parse::<usize>().map_err(|_| Error::Parse {
                line: 1,
                col: i + 1,
                msg: format!("bad count {tok:?}"),
            })
        })
        .collect()
}
