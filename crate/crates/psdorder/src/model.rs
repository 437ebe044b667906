//! Model files: `{"label": str, "X": [[...]], "D": [[...]], "sigma2": number}`
//! with `sigma2` optional (default 1).

use std::fs;
use std::path::Path;

use psdorder_core::linmodels::LinearModel;
use psdorder_core::{Matrix, PsdMatrix, SymMatrix, ToleranceConfig};
use serde::Deserialize;

use crate::io::{IoError, ParseError};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    #[serde(default)]
    label: String,
    #[serde(rename = "X")]
    x: Vec<Vec<f64>>,
    #[serde(rename = "D")]
    d: Vec<Vec<f64>>,
    #[serde(default = "unit")]
    sigma2: f64,
}

fn unit() -> f64 {
    1.0
}

fn rows_to_matrix(rows: &[Vec<f64>], what: &str) -> Result<Matrix, ParseError> {
    Matrix::from_rows(rows).map_err(|e| ParseError::Json(format!("{what}: {e}")))
}

/// Parses a model and certifies `D` as PSD.
pub fn parse_model(text: &str, tol: &ToleranceConfig) -> Result<LinearModel, ModelError> {
    let f: ModelFile =
        serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    let x = rows_to_matrix(&f.x, "X")?;
    let d = SymMatrix::new(rows_to_matrix(&f.d, "D")?, tol)?;
    let d = PsdMatrix::certify(d, tol)?;
    Ok(LinearModel::new(x, d, f.sigma2, f.label)?)
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Invalid(#[from] psdorder_core::Error),
}

/// [`parse_model`] on a file; an empty label defaults to the file stem.
pub fn read_model(path: &Path, tol: &ToleranceConfig) -> Result<LinearModel, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let mut model = parse_model(&text, tol).map_err(|e| match e {
        ModelError::Parse(source) => IoError::Parse {
            path: path.to_path_buf(),
            source,
        },
        ModelError::Invalid(source) => IoError::Matrix {
            path: path.to_path_buf(),
            source,
        },
    })?;
    if model.label.is_empty() {
        model.label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
    }
    Ok(model)
}
