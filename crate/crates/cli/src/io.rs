//! Matrix files: JSON objects `{"rows": r, "cols": c, "data": [[re, im], ...]}`
//! with `data` in row-major order.

use std::fs;
use std::path::Path;

use semirad_core::{Complex64, ComplexMatrix};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixFile {
    fn from(m: &ComplexMatrix) -> Self {
        Self { rows: m.rows(), cols: m.cols(), data: m.data().iter().map(|z| [z.re, z.im]).collect() }
    }
}

impl MatrixFile {
    pub fn to_matrix(&self) -> semirad_core::Result<ComplexMatrix> {
        let data = self.data.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        ComplexMatrix::new(self.rows, self.cols, data)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.into(), source })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|source| CliError::Json { path: path.into(), source })?;
    fs::write(path, text + "\n").map_err(|source| CliError::Io { path: path.into(), source })
}

pub fn read_matrix(path: &Path) -> CliResult<ComplexMatrix> {
    let file: MatrixFile = read_json(path)?;
    Ok(file.to_matrix()?)
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> CliResult<()> {
    write_json(path, &MatrixFile::from(m))
}
