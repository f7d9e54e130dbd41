//! Crate-wide error type.

use std::path::PathBuf;

/// Errors surfaced by the library and mapped to exit codes by the CLI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: file contains no data rows")]
    EmptyInput { path: PathBuf },

    #[error("{path}:{line}: expected {expected} columns, found {found}")]
    RaggedRow {
        path: PathBuf,
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("{path}:{line}: expected a single column, found {found}")]
    NotSingleColumn {
        path: PathBuf,
        line: usize,
        found: usize,
    },

    #[error("{path}:{line}: column {column}: cannot parse {token:?} as a finite number")]
    BadNumber {
        path: PathBuf,
        line: usize,
        column: usize,
        token: String,
    },

    #[error("{path}: malformed report: {detail}")]
    BadReport { path: PathBuf, detail: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("singular value decomposition did not converge")]
    SvdFailed,

    #[error("basis is not orthonormal: vectors {i} and {j} deviate by {deviation:e}")]
    NotOrthonormal { i: usize, j: usize, deviation: f64 },

    #[error("index {index} out of range for {len} target eigenvectors")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("alpha must lie in [0, 1), got {0}")]
    BadAlpha(f64),

    #[error("{0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    BadConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
