//! Text formats: headerless CSV for dense matrices, Matrix Market array for
//! dense interchange, Matrix Market coordinate (1-based) for sparse
//! coefficient matrices and symmetric adjacency input.
//!
//! All parsers work on in-memory text and report 1-based line/column
//! positions so CLI errors can point at the offending token. All writers emit
//! shortest round-trip float formatting, making outputs byte-stable across
//! reruns.

use crate::coeff::{CoefficientMatrix, SparseSimplexColumn};
use crate::dense::DenseMatrix;
use crate::error::Error;

/// Headerless CSV, one matrix row per line. Lines starting with `#` are
/// comments (the CLI writes its configuration echo as one). Rejects ragged
/// rows and non-finite values.
pub fn parse_dense_csv(text: &str) -> Result<DenseMatrix, Error> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            // tolerate a trailing blank line, nothing interior
            if text.lines().skip(lineno + 1).any(|l| !l.trim().is_empty()) {
                return Err(Error::parse(lineno + 1, 1, "empty row"));
            }
            continue;
        }
        let mut row = Vec::new();
        for (colno, field) in line.split(',').enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::parse(lineno + 1, colno + 1, format!("invalid number {field:?}"))
            })?;
            if !v.is_finite() {
                return Err(Error::parse(lineno + 1, colno + 1, "non-finite value"));
            }
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::parse(
                    lineno + 1,
                    1,
                    format!("row has {} fields, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::parse(1, 1, "empty matrix"));
    }
    let nrows = rows.len();
    let ncols = rows[0].len();
    Ok(DenseMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn write_dense_csv(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&m.get(i, j).to_string());
        }
        out.push('\n');
    }
    out
}

fn mm_header(line: &str) -> Result<(bool, bool), Error> {
    // (is_coordinate, is_symmetric)
    let lower = line.to_ascii_lowercase();
    let fields: Vec<&str> = lower.split_whitespace().collect();
    if fields.len() < 4 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(Error::parse(1, 1, "expected '%%MatrixMarket matrix ...' header"));
    }
    let coord = match fields[2] {
        "coordinate" => true,
        "array" => false,
        other => return Err(Error::parse(1, 1, format!("unsupported storage {other:?}"))),
    };
    if fields[3] != "real" {
        return Err(Error::parse(1, 1, format!("unsupported field type {:?}", fields[3])));
    }
    let sym = match fields.get(4).copied().unwrap_or("general") {
        "general" => false,
        "symmetric" => true,
        other => return Err(Error::parse(1, 1, format!("unsupported symmetry {other:?}"))),
    };
    Ok((coord, sym))
}

/// Lines of an MM body with comments stripped, keeping 1-based line numbers.
fn mm_body(text: &str) -> Result<((bool, bool), Vec<(usize, &str)>), Error> {
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, l)) if l.trim().is_empty() => continue,
            Some((_, l)) => break l,
            None => return Err(Error::parse(1, 1, "empty file")),
        }
    };
    let kind = mm_header(header)?;
    let body = lines
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('%')
        })
        .map(|(i, l)| (i + 1, l.trim()))
        .collect();
    Ok((kind, body))
}

fn parse_usize(line: usize, col: usize, field: &str) -> Result<usize, Error> {
    field
        .parse()
        .map_err(|_| Error::parse(line, col, format!("invalid integer {field:?}")))
}

fn parse_f64(line: usize, col: usize, field: &str) -> Result<f64, Error> {
    let v: f64 = field
        .parse()
        .map_err(|_| Error::parse(line, col, format!("invalid number {field:?}")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, col, "non-finite value"));
    }
    Ok(v)
}

/// Matrix Market array (dense, column-major values).
pub fn parse_mm_dense(text: &str) -> Result<DenseMatrix, Error> {
    let ((coord, sym), body) = mm_body(text)?;
    if coord || sym {
        return Err(Error::parse(1, 1, "expected 'array real general'"));
    }
    let mut it = body.into_iter();
    let (sline, size) = it.next().ok_or_else(|| Error::parse(1, 1, "missing size line"))?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(Error::parse(sline, 1, "size line must be 'rows cols'"));
    }
    let rows = parse_usize(sline, 1, dims[0])?;
    let cols = parse_usize(sline, 2, dims[1])?;
    let mut data = Vec::with_capacity(rows * cols);
    for (lineno, line) in it {
        for (colno, field) in line.split_whitespace().enumerate() {
            data.push(parse_f64(lineno, colno + 1, field)?);
        }
    }
    if data.len() != rows * cols {
        return Err(Error::parse(
            1,
            1,
            format!("expected {} values, found {}", rows * cols, data.len()),
        ));
    }
    DenseMatrix::from_data(rows, cols, data)
}

pub fn write_mm_dense(m: &DenseMatrix) -> String {
    let mut out = format!(
        "%%MatrixMarket matrix array real general\n{} {}\n",
        m.rows(),
        m.cols()
    );
    for v in m.data() {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

/// Raw coordinate triples from an MM coordinate file, 0-based on return.
/// Symmetric files are *not* expanded here; the flag is returned so callers
/// decide how to mirror.
pub struct CoordinateData {
    pub rows: usize,
    pub cols: usize,
    pub symmetric: bool,
    pub entries: Vec<(usize, usize, f64)>,
}

pub fn parse_mm_coordinate(text: &str) -> Result<CoordinateData, Error> {
    let ((coord, symmetric), body) = mm_body(text)?;
    if !coord {
        return Err(Error::parse(1, 1, "expected 'coordinate real'"));
    }
    let mut it = body.into_iter();
    let (sline, size) = it.next().ok_or_else(|| Error::parse(1, 1, "missing size line"))?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    if dims.len() != 3 {
        return Err(Error::parse(sline, 1, "size line must be 'rows cols nnz'"));
    }
    let rows = parse_usize(sline, 1, dims[0])?;
    let cols = parse_usize(sline, 2, dims[1])?;
    let nnz = parse_usize(sline, 3, dims[2])?;
    let mut entries = Vec::with_capacity(nnz);
    for (lineno, line) in it {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(lineno, 1, "entry line must be 'i j value'"));
        }
        let i = parse_usize(lineno, 1, fields[0])?;
        let j = parse_usize(lineno, 2, fields[1])?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(Error::parse(
                lineno,
                1,
                format!("index ({i}, {j}) outside 1..={rows} x 1..={cols}"),
            ));
        }
        let v = parse_f64(lineno, 3, fields[2])?;
        entries.push((i - 1, j - 1, v));
    }
    if entries.len() != nnz {
        return Err(Error::parse(
            1,
            1,
            format!("expected {nnz} entries, found {}", entries.len()),
        ));
    }
    Ok(CoordinateData { rows, cols, symmetric, entries })
}

/// Coefficient matrix as MM coordinate, entries in column-major order —
/// a canonical, byte-stable listing.
pub fn write_coefficient_mm(c: &CoefficientMatrix) -> String {
    let mut out = format!(
        "%%MatrixMarket matrix coordinate real general\n{} {} {}\n",
        c.dim(),
        c.dim(),
        c.total_nnz()
    );
    for l in 0..c.dim() {
        for (i, v) in c.column(l).iter() {
            out.push_str(&format!("{} {} {}\n", i + 1, l + 1, v));
        }
    }
    out
}

/// Read a coefficient matrix from MM coordinate. The matrix must be square;
/// duplicate positions are a parse error, negative values an infeasibility.
pub fn parse_coefficient_mm(text: &str) -> Result<CoefficientMatrix, Error> {
    let data = parse_mm_coordinate(text)?;
    if data.symmetric {
        return Err(Error::parse(1, 1, "coefficient matrices must be 'general'"));
    }
    if data.rows != data.cols {
        return Err(Error::parse(
            1,
            1,
            format!("coefficient matrix must be square, got {}x{}", data.rows, data.cols),
        ));
    }
    let dim = data.rows;
    let mut per_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
    for (i, j, v) in data.entries {
        per_col[j].push((i, v));
    }
    let mut columns = Vec::with_capacity(dim);
    for (j, entries) in per_col.into_iter().enumerate() {
        let mut sorted = entries;
        sorted.sort_unstable_by_key(|&(i, _)| i);
        if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::parse(1, 1, format!("duplicate entry in column {}", j + 1)));
        }
        columns.push(SparseSimplexColumn::from_entries(dim, sorted)?);
    }
    CoefficientMatrix::from_columns(columns)
}
