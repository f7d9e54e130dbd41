//! Data matrices, target vectors, regressors, and every file format the
//! toolkit reads or writes.
//!
//! Matrix files are UTF-8 comma-separated text with samples as rows and
//! features as columns, LF or CRLF line endings, and an optional single
//! header line. Adaptation reports are JSON (see [`ReportFile`]).
//!
//! All I/O here is stateless; distinct files may be loaded concurrently.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::adapt::AdaptationReport;
use crate::error::{Error, Result};

/// An N×D real matrix of samples-as-rows (source `X` or target `Z`).
///
/// Construction rejects empty shapes and non-finite entries, so downstream
/// numerics never see NaN or infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    inner: DMatrix<f64>,
}

impl DataMatrix {
    /// Builds a matrix from row-major values.
    pub fn from_rows(n_rows: usize, n_cols: usize, values: &[f64]) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix must have at least one row and one column, got {n_rows}x{n_cols}"
            )));
        }
        if values.len() != n_rows * n_cols {
            return Err(Error::DimensionMismatch(format!(
                "{n_rows}x{n_cols} matrix needs {} values, got {}",
                n_rows * n_cols,
                values.len()
            )));
        }
        Self::from_matrix(DMatrix::from_row_slice(n_rows, n_cols, values))
    }

    /// Wraps an existing matrix, enforcing the same invariants as
    /// [`DataMatrix::from_rows`].
    pub fn from_matrix(inner: DMatrix<f64>) -> Result<Self> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(Error::DimensionMismatch(
                "matrix must have at least one row and one column".into(),
            ));
        }
        if !inner.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("matrix entries must be finite".into()));
        }
        Ok(Self { inner })
    }

    /// Number of samples N.
    pub fn n_rows(&self) -> usize {
        self.inner.nrows()
    }

    /// Feature dimension D.
    pub fn n_cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    /// Predicts a target for every row: `m * w`.
    pub fn predict(&self, w: &Regressor) -> Result<TargetVector> {
        if w.len() != self.n_cols() {
            return Err(Error::DimensionMismatch(format!(
                "regressor dimension {} does not match feature dimension {}",
                w.len(),
                self.n_cols()
            )));
        }
        Ok(TargetVector {
            inner: &self.inner * w.vector(),
        })
    }
}

/// Regression targets paired with the rows of a [`DataMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct TargetVector {
    inner: DVector<f64>,
}

impl TargetVector {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DimensionMismatch(
                "target vector must have at least one entry".into(),
            ));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("target entries must be finite".into()));
        }
        Ok(Self {
            inner: DVector::from_row_slice(values),
        })
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.len() == 0
    }

    pub fn values(&self) -> &[f64] {
        self.inner.as_slice()
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.inner
    }

    /// Sum of squared differences to another target vector of equal length.
    pub fn squared_error(&self, other: &TargetVector) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!(
                "target lengths differ: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Ok((&self.inner - &other.inner).norm_squared())
    }
}

/// A D-dimensional weight vector. There is no intercept; models that need
/// centering must pre-center their data.
#[derive(Debug, Clone, PartialEq)]
pub struct Regressor {
    inner: DVector<f64>,
}

impl Regressor {
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::DimensionMismatch(
                "regressor must have at least one weight".into(),
            ));
        }
        if !weights.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("regressor weights must be finite".into()));
        }
        Ok(Self {
            inner: DVector::from_row_slice(weights),
        })
    }

    pub(crate) fn from_vector(inner: DVector<f64>) -> Self {
        Self { inner }
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.len() == 0
    }

    pub fn weights(&self) -> &[f64] {
        self.inner.as_slice()
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.inner
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut lines: Vec<String> = text.lines().map(|l| l.trim_end_matches('\r').to_string()).collect();
    // Trailing blank lines are tolerated; interior ones are format errors.
    while lines.last().is_some_and(|l| l.trim().is_empty()) {
        lines.pop();
    }
    Ok(lines)
}

fn parse_cell(token: &str, path: &Path, line: usize, column: usize) -> Result<f64> {
    let trimmed = token.trim();
    match trimmed.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::BadNumber {
            path: path.to_path_buf(),
            line,
            column,
            token: trimmed.to_string(),
        }),
    }
}

/// Loads a comma-separated matrix file. Line numbers in errors are 1-based
/// physical lines, counting the header when present.
pub fn load_matrix(path: &Path, has_header: bool) -> Result<DataMatrix> {
    let lines = read_lines(path)?;
    let start = usize::from(has_header);
    if lines.len() <= start {
        return Err(Error::EmptyInput {
            path: path.to_path_buf(),
        });
    }

    let mut values = Vec::new();
    let mut n_cols = 0usize;
    let mut n_rows = 0usize;
    for (idx, line) in lines.iter().enumerate().skip(start) {
        let line_no = idx + 1;
        let cells: Vec<&str> = if line.trim().is_empty() {
            Vec::new()
        } else {
            line.split(',').collect()
        };
        if n_rows == 0 {
            n_cols = cells.len();
        }
        if cells.len() != n_cols || cells.is_empty() {
            return Err(Error::RaggedRow {
                path: path.to_path_buf(),
                line: line_no,
                expected: n_cols.max(1),
                found: cells.len(),
            });
        }
        for (c, token) in cells.iter().enumerate() {
            values.push(parse_cell(token, path, line_no, c + 1)?);
        }
        n_rows += 1;
    }
    DataMatrix::from_rows(n_rows, n_cols, &values)
}

/// Loads a single-column numeric file of regression targets.
pub fn load_targets(path: &Path) -> Result<TargetVector> {
    let lines = read_lines(path)?;
    if lines.is_empty() {
        return Err(Error::EmptyInput {
            path: path.to_path_buf(),
        });
    }
    let mut values = Vec::with_capacity(lines.len());
    for (idx, line) in lines.iter().enumerate() {
        let line_no = idx + 1;
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 1 {
            return Err(Error::NotSingleColumn {
                path: path.to_path_buf(),
                line: line_no,
                found: cells.len(),
            });
        }
        values.push(parse_cell(cells[0], path, line_no, 1)?);
    }
    TargetVector::from_values(&values)
}

/// Writes a matrix at 17 significant digits, which round-trips 64-bit reals
/// exactly through [`load_matrix`].
pub fn save_matrix(m: &DataMatrix, path: &Path) -> Result<()> {
    let mut out = String::new();
    for r in 0..m.n_rows() {
        for c in 0..m.n_cols() {
            if c > 0 {
                out.push(',');
            }
            let _ = write!(out, "{:.16e}", m.matrix()[(r, c)]);
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes a target vector in the single-column format read by
/// [`load_targets`], at 17 significant digits.
pub fn save_targets(y: &TargetVector, path: &Path) -> Result<()> {
    let mut out = String::new();
    for v in y.values() {
        let _ = writeln!(out, "{v:.16e}");
    }
    fs::write(path, out).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One row of the serialized eigenvector ledger. `j` is the 0-based position
/// in the descending-eigenvalue ordering of the target spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub j: usize,
    pub lambda_z_sq: f64,
    pub var_zj: f64,
    pub bias_hat_zj: f64,
    pub selected: bool,
}

/// On-disk form of an adaptation report.
///
/// JSON numbers are written in the shortest form that parses back to the
/// identical 64-bit value, so save followed by load is bit-exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub alpha: f64,
    pub sigma2_hat: f64,
    pub weights_ols: Vec<f64>,
    pub weights_spar: Vec<f64>,
    pub selected_indices: Vec<usize>,
    pub ledger: Vec<LedgerRow>,
}

impl From<&AdaptationReport> for ReportFile {
    fn from(report: &AdaptationReport) -> Self {
        let ledger = report
            .ledger
            .entries()
            .iter()
            .map(|e| LedgerRow {
                j: e.index,
                lambda_z_sq: e.lambda_z_sq,
                var_zj: e.var,
                bias_hat_zj: e.bias_hat.unwrap_or(0.0),
                selected: e.selected,
            })
            .collect();
        ReportFile {
            alpha: report.alpha.value(),
            sigma2_hat: report.sigma2_hat,
            weights_ols: report.weights_ols.weights().to_vec(),
            weights_spar: report.weights_spar.weights().to_vec(),
            selected_indices: report.selection.indices().to_vec(),
            ledger,
        }
    }
}

impl ReportFile {
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string(self).map_err(|e| Error::BadReport {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
        text.push('\n');
        fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| Error::BadReport {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })
    }
}

/// Serializes a fully populated adaptation report to JSON.
pub fn save_report(report: &AdaptationReport, path: &Path) -> Result<()> {
    ReportFile::from(report).save(path)
}

/// Reads a report back in its on-disk form.
pub fn load_report(path: &Path) -> Result<ReportFile> {
    ReportFile::load(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_identity_matrix() {
        let f = write_temp("1,0\n0,1\n");
        let m = load_matrix(f.path(), false).unwrap();
        assert_eq!((m.n_rows(), m.n_cols()), (2, 2));
        assert_eq!(m.matrix()[(0, 0)], 1.0);
        assert_eq!(m.matrix()[(1, 0)], 0.0);
        assert_eq!(m.matrix()[(1, 1)], 1.0);
    }

    #[test]
    fn skips_header_when_asked() {
        let f = write_temp("f1,f2\n3,5\n");
        let m = load_matrix(f.path(), true).unwrap();
        assert_eq!((m.n_rows(), m.n_cols()), (1, 2));
        assert_eq!(m.matrix()[(0, 0)], 3.0);
        assert_eq!(m.matrix()[(0, 1)], 5.0);
    }

    #[test]
    fn ragged_row_cites_offending_line() {
        let f = write_temp("1,2,3\n4,5,6\n7,8\n");
        match load_matrix(f.path(), false) {
            Err(Error::RaggedRow { line, expected, found, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(expected, 3);
                assert_eq!(found, 2);
            }
            other => panic!("expected ragged-row error, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_cell_reports_position() {
        let f = write_temp("1\nxyz\n");
        match load_targets(f.path()) {
            Err(Error::BadNumber { line, column, token, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(column, 1);
                assert_eq!(token, "xyz");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_empty_and_multi_column_targets() {
        let f = write_temp("");
        assert!(matches!(load_targets(f.path()), Err(Error::EmptyInput { .. })));

        let f = write_temp("1,2\n");
        assert!(matches!(
            load_targets(f.path()),
            Err(Error::NotSingleColumn { line: 1, found: 2, .. })
        ));
    }

    #[test]
    fn loads_simple_targets() {
        let f = write_temp("1\n2\n3\n");
        let y = load_targets(f.path()).unwrap();
        assert_eq!(y.values(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn crlf_and_trailing_newlines_are_tolerated() {
        let f = write_temp("1,2\r\n3,4\r\n\n");
        let m = load_matrix(f.path(), false).unwrap();
        assert_eq!((m.n_rows(), m.n_cols()), (2, 2));
        assert_eq!(m.matrix()[(1, 1)], 4.0);
    }

    #[test]
    fn rejects_inf_entries() {
        let f = write_temp("1,inf\n");
        assert!(matches!(load_matrix(f.path(), false), Err(Error::BadNumber { .. })));
    }

    #[test]
    fn matrix_written_at_17_digits_round_trips_exactly() {
        let values = [0.1, 1.0 / 3.0, -2.5e-13, 7.25, 1e100, -0.0, std::f64::consts::PI, 2.2250738585072014e-308];
        let m = DataMatrix::from_rows(4, 2, &values).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_matrix(&m, f.path()).unwrap();
        let back = load_matrix(f.path(), false).unwrap();
        for (a, b) in m.matrix().iter().zip(back.matrix().iter()) {
            assert_eq!(a.to_bits(), b.to_bits(), "{a:e} vs {b:e}");
        }
    }

    #[test]
    fn seventeen_digit_decimal_is_lossless_for_doubles() {
        // The round-trip oracle behind the report format: any f64 printed
        // with 17 significant digits parses back to the same bits.
        let samples = [0.1, 0.2, 1.0 / 7.0, 6.02214076e23, f64::MIN_POSITIVE, -9.869604401089358];
        for v in samples {
            let s = format!("{v:.16e}");
            let back: f64 = s.parse().unwrap();
            assert_eq!(v.to_bits(), back.to_bits(), "{v} -> {s} -> {back}");
        }
    }

    #[test]
    fn predict_checks_dimensions() {
        let m = DataMatrix::from_rows(2, 2, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let w = Regressor::from_weights(&[3.0, 5.0, 7.0]).unwrap();
        assert!(matches!(m.predict(&w), Err(Error::DimensionMismatch(_))));
    }
}
