//! Singular value decomposition, pseudoinverse regression, and subspace
//! projection: the linear-algebra substrate for everything else.
//!
//! The decomposition is thin: for an N×D matrix it keeps min(N, D) singular
//! triplets. When the target matrix has fewer rows than columns, right
//! singular directions outside its row span are simply absent; they carry
//! zero target variance and never influence predictions on that matrix.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};

use crate::data::{DataMatrix, Regressor, TargetVector};
use crate::error::{Error, Result};

/// Relative threshold under which a singular value counts as zero.
///
/// A singular value λ is treated as positive iff
/// `λ > relative_threshold · λ_max · max(N, D)`, the usual numerical-rank
/// rule. This is the concrete realization of the exact-arithmetic indicator
/// `1[λ > 0]` appearing in the closed-form risk expressions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankTolerance {
    relative_threshold: f64,
}

impl RankTolerance {
    pub const DEFAULT_RELATIVE: f64 = 1e-12;

    pub fn new(relative_threshold: f64) -> Result<Self> {
        if !relative_threshold.is_finite() || relative_threshold < 0.0 {
            return Err(Error::Domain(format!(
                "rank tolerance must be a nonnegative finite number, got {relative_threshold}"
            )));
        }
        Ok(Self { relative_threshold })
    }

    pub fn relative(self) -> f64 {
        self.relative_threshold
    }

    /// Absolute cutoff for a spectrum with the given top value and shape.
    pub fn cutoff(self, max_singular_value: f64, n_rows: usize, n_cols: usize) -> f64 {
        self.relative_threshold * max_singular_value * n_rows.max(n_cols) as f64
    }
}

impl Default for RankTolerance {
    fn default() -> Self {
        Self {
            relative_threshold: Self::DEFAULT_RELATIVE,
        }
    }
}

/// Thin SVD of a data matrix with deterministic signs.
///
/// Singular values are sorted descending. Right singular vectors are
/// sign-normalized so their largest-magnitude entry is positive (first such
/// entry on ties), with the matching left vector flipped in tandem; reports
/// become reproducible across runs while every squared inner product the
/// risk formulas use is unaffected.
#[derive(Debug, Clone)]
pub struct Spectrum {
    singular_values: Vec<f64>,
    /// D×K, column j = right singular vector e_j.
    right: DMatrix<f64>,
    /// N×K, column j = left singular vector u_j.
    left: DMatrix<f64>,
    numerical_rank: usize,
    n_rows: usize,
    n_cols: usize,
}

impl Spectrum {
    /// Assembles a spectrum from parts, validating ordering and
    /// orthonormality. Intended for synthetic spectra in tests and
    /// diagnostics; [`decompose`] is the normal constructor.
    pub fn from_parts(
        singular_values: Vec<f64>,
        right: DMatrix<f64>,
        left: DMatrix<f64>,
        tol: RankTolerance,
    ) -> Result<Self> {
        let k = singular_values.len();
        if right.ncols() != k || left.ncols() != k {
            return Err(Error::DimensionMismatch(format!(
                "{k} singular values but {} right and {} left vectors",
                right.ncols(),
                left.ncols()
            )));
        }
        for (i, &s) in singular_values.iter().enumerate() {
            if !s.is_finite() || s < 0.0 {
                return Err(Error::Domain(format!("singular value {i} is {s}")));
            }
            if i > 0 && s > singular_values[i - 1] {
                return Err(Error::Domain(
                    "singular values must be sorted descending".into(),
                ));
            }
        }
        check_orthonormal_columns(&right, 1e-10)?;
        check_orthonormal_columns(&left, 1e-10)?;
        let n_rows = left.nrows();
        let n_cols = right.nrows();
        let max_sv = singular_values.first().copied().unwrap_or(0.0);
        let cutoff = tol.cutoff(max_sv, n_rows, n_cols);
        let numerical_rank = singular_values.iter().filter(|&&s| s > cutoff).count();
        Ok(Self {
            singular_values,
            right,
            left,
            numerical_rank,
            n_rows,
            n_cols,
        })
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// Number of retained singular triplets, min(N, D).
    pub fn n_vectors(&self) -> usize {
        self.singular_values.len()
    }

    /// Right singular vectors as the columns of a D×K matrix.
    pub fn right_vectors(&self) -> &DMatrix<f64> {
        &self.right
    }

    /// Left singular vectors as the columns of an N×K matrix.
    pub fn left_vectors(&self) -> &DMatrix<f64> {
        &self.left
    }

    /// Owned copy of right singular vector `j`.
    pub fn right_vector(&self, j: usize) -> DVector<f64> {
        self.right.column(j).clone_owned()
    }

    pub fn numerical_rank(&self) -> usize {
        self.numerical_rank
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Absolute cutoff realizing `1[λ > 0]` for this spectrum.
    pub fn positive_cutoff(&self, tol: RankTolerance) -> f64 {
        let max_sv = self.singular_values.first().copied().unwrap_or(0.0);
        tol.cutoff(max_sv, self.n_rows, self.n_cols)
    }
}

fn check_orthonormal_columns(m: &DMatrix<f64>, tol: f64) -> Result<()> {
    for i in 0..m.ncols() {
        for j in i..m.ncols() {
            let g = m.column(i).dot(&m.column(j));
            let target = if i == j { 1.0 } else { 0.0 };
            let deviation = (g - target).abs();
            if deviation > tol {
                return Err(Error::NotOrthonormal { i, j, deviation });
            }
        }
    }
    Ok(())
}

/// Computes the thin SVD of `m` and the numerical rank under `tol`.
///
/// Non-convergence of the underlying iteration is surfaced as an error
/// rather than silently truncated, and the factorization is checked against
/// the input: ‖M − UΣVᵀ‖_F must stay below 1e-8 · max(1, ‖M‖_F).
pub fn decompose(m: &DataMatrix, tol: RankTolerance) -> Result<Spectrum> {
    let a = m.matrix();
    let (n, d) = (a.nrows(), a.ncols());
    let svd = faer::Mat::from_fn(n, d, |i, j| a[(i, j)])
        .thin_svd()
        .map_err(|_| Error::SvdFailed)?;
    let u = svd.U();
    let sv = svd.S();
    let v = svd.V();
    let k = n.min(d);

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| sv[y].partial_cmp(&sv[x]).unwrap_or(Ordering::Equal));

    let mut singular_values = Vec::with_capacity(k);
    let mut right = DMatrix::zeros(d, k);
    let mut left = DMatrix::zeros(n, k);
    for (new_j, &old_j) in order.iter().enumerate() {
        singular_values.push(sv[old_j]);
        let mut e = DVector::from_fn(d, |row, _| v[(row, old_j)]);
        let mut uj = DVector::from_fn(n, |row, _| u[(row, old_j)]);
        // Deterministic sign: make the first largest-magnitude entry positive.
        let mut pivot = 0;
        let mut best = -1.0;
        for (idx, &val) in e.iter().enumerate() {
            let mag = val.abs();
            if mag > best {
                best = mag;
                pivot = idx;
            }
        }
        if e[pivot] < 0.0 {
            e.neg_mut();
            uj.neg_mut();
        }
        right.set_column(new_j, &e);
        left.set_column(new_j, &uj);
    }

    let max_sv = singular_values.first().copied().unwrap_or(0.0);
    let cutoff = tol.cutoff(max_sv, n, d);
    let numerical_rank = singular_values.iter().filter(|&&s| s > cutoff).count();

    let recon = &left * DMatrix::from_diagonal(&DVector::from_row_slice(&singular_values)) * right.transpose();
    let residual = (a - recon).norm();
    if residual > 1e-8 * a.norm().max(1.0) {
        return Err(Error::SvdFailed);
    }

    Ok(Spectrum {
        singular_values,
        right,
        left,
        numerical_rank,
        n_rows: n,
        n_cols: d,
    })
}

/// Minimum-norm least-squares solution from an already computed spectrum.
///
/// Singular directions at or below the rank cutoff are dropped, which is
/// what makes the solution minimum-norm on rank-deficient inputs.
pub fn pinv_from_spectrum(
    spectrum: &Spectrum,
    y: &TargetVector,
    tol: RankTolerance,
) -> Result<Regressor> {
    if y.len() != spectrum.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} targets for a matrix with {} rows",
            y.len(),
            spectrum.n_rows()
        )));
    }
    let cutoff = spectrum.positive_cutoff(tol);
    let mut w = DVector::zeros(spectrum.n_cols());
    for (i, &s) in spectrum.singular_values().iter().enumerate() {
        if s > cutoff {
            let c = spectrum.left.column(i).dot(y.vector()) / s;
            w.axpy(c, &spectrum.right.column(i), 1.0);
        }
    }
    Ok(Regressor::from_vector(w))
}

/// The pseudoinverse (minimum-norm least-squares) regressor `X† y`.
pub fn pinv_solve(x: &DataMatrix, y: &TargetVector, tol: RankTolerance) -> Result<Regressor> {
    let spectrum = decompose(x, tol)?;
    pinv_from_spectrum(&spectrum, y, tol)
}

/// Removes the components of `w` along an orthonormal set of directions:
/// `w - Σ_e ⟨w, e⟩ e`.
///
/// An empty basis returns `w` unchanged; a full orthonormal basis of ℝ^D
/// returns the zero vector.
pub fn project_out(w: &Regressor, basis: &[DVector<f64>]) -> Result<Regressor> {
    for e in basis {
        if e.len() != w.len() {
            return Err(Error::DimensionMismatch(format!(
                "basis vector of dimension {} against regressor of dimension {}",
                e.len(),
                w.len()
            )));
        }
    }
    for i in 0..basis.len() {
        for j in i..basis.len() {
            let g = basis[i].dot(&basis[j]);
            let target = if i == j { 1.0 } else { 0.0 };
            let deviation = (g - target).abs();
            if deviation > 1e-8 {
                return Err(Error::NotOrthonormal { i, j, deviation });
            }
        }
    }
    let mut out = w.vector().clone();
    for e in basis {
        let c = out.dot(e);
        out.axpy(-c, e, 1.0);
    }
    Ok(Regressor::from_vector(out))
}
