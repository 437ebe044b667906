//! Matrix and vector files.
//!
//! CSV: one row per line, comma-separated decimals, equal row lengths. Blank
//! lines and lines starting with `#` are skipped.
//! JSON: `{"n": <rows>, "entries": [[...], ...]}`.
//!
//! Writers emit 17 significant digits so every `f64` survives a round trip.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use psdorder_core::{Matrix, PsdMatrix, SymMatrix, ToleranceConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error("{path}: {source}")]
    Matrix {
        path: PathBuf,
        #[source]
        source: psdorder_core::Error,
    },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: malformed number `{token}`")]
    BadNumber { line: usize, token: String },
    #[error("line {line}: ragged rows (expected {expected} entries, found {found})")]
    Ragged {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("no rows")]
    Empty,
    #[error("invalid JSON matrix: {0}")]
    Json(String),
    #[error("`n` is {n} but there are {rows} rows")]
    RowCount { n: usize, rows: usize },
    #[error("expected a vector, got a {rows}x{cols} matrix")]
    NotVector { rows: usize, cols: usize },
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonMatrix {
    n: usize,
    entries: Vec<Vec<f64>>,
}

pub fn parse_csv(text: &str) -> Result<Matrix, ParseError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                tok.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| ParseError::BadNumber {
                        line: idx + 1,
                        token: tok.to_string(),
                    })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(ParseError::Ragged {
                    line: idx + 1,
                    expected: first.len(),
                    found: row.len(),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(ParseError::Empty);
    }
    Ok(Matrix::from_rows(&rows).expect("rows checked equal length"))
}

pub fn parse_json(text: &str) -> Result<Matrix, ParseError> {
    let m: JsonMatrix = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    if m.entries.len() != m.n {
        return Err(ParseError::RowCount {
            n: m.n,
            rows: m.entries.len(),
        });
    }
    if m.entries.is_empty() {
        return Err(ParseError::Empty);
    }
    let width = m.entries[0].len();
    if let Some((i, r)) = m.entries.iter().enumerate().find(|(_, r)| r.len() != width) {
        return Err(ParseError::Ragged {
            line: i + 1,
            expected: width,
            found: r.len(),
        });
    }
    if let Some(v) = m.entries.iter().flatten().find(|v| !v.is_finite()) {
        return Err(ParseError::BadNumber {
            line: 0,
            token: v.to_string(),
        });
    }
    Ok(Matrix::from_rows(&m.entries).expect("rows checked equal length"))
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Reads a general (possibly rectangular) matrix, CSV or JSON by extension.
pub fn read_general_matrix(path: &Path) -> Result<Matrix, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let parsed = if is_json(path) {
        parse_json(&text)
    } else {
        parse_csv(&text)
    };
    parsed.map_err(|source| IoError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a square matrix and symmetrizes it by averaging with its transpose.
/// When the asymmetry exceeds `sym_tol * max(1, ‖A‖_max)` a warning goes to
/// `warn`.
pub fn read_matrix(
    path: &Path,
    tol: &ToleranceConfig,
    warn: &mut dyn Write,
) -> Result<SymMatrix, IoError> {
    let m = read_general_matrix(path)?;
    let scale = m.max_abs().max(1.0);
    let (s, asym) = SymMatrix::symmetrized(m).map_err(|source| IoError::Matrix {
        path: path.to_path_buf(),
        source,
    })?;
    if asym > tol.sym_tol * scale {
        let _ = writeln!(
            warn,
            "warning: {} is not symmetric (asymmetry {asym:e}); using (A + Aᵗ)/2",
            path.display()
        );
    }
    Ok(s)
}

/// [`read_matrix`] followed by PSD certification.
pub fn read_psd(
    path: &Path,
    tol: &ToleranceConfig,
    warn: &mut dyn Write,
) -> Result<PsdMatrix, IoError> {
    let s = read_matrix(path, tol, warn)?;
    PsdMatrix::certify(s, tol).map_err(|source| IoError::Matrix {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a single row or a single column as a vector.
pub fn read_vector(path: &Path) -> Result<Vec<f64>, IoError> {
    let m = read_general_matrix(path)?;
    match m.shape() {
        (1, _) => Ok(m.row(0).to_vec()),
        (_, 1) => Ok(m.column(0)),
        (rows, cols) => Err(IoError::Parse {
            path: path.to_path_buf(),
            source: ParseError::NotVector { rows, cols },
        }),
    }
}

pub fn format_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v:.16e}").expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

pub fn format_json(m: &Matrix) -> String {
    serde_json::to_string(&JsonMatrix {
        n: m.rows(),
        entries: m.to_rows(),
    })
    .expect("finite entries serialize")
}

/// Writes CSV, or JSON when the extension is `.json`.
pub fn write_matrix(path: &Path, m: &Matrix) -> Result<(), IoError> {
    let text = if is_json(path) {
        format_json(m)
    } else {
        format_csv(m)
    };
    fs::write(path, text).map_err(|source| IoError::Write {
        path: path.to_path_buf(),
        source,
    })
}
