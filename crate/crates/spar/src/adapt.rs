//! Eigenvector selection and the spectral adaptation pipeline, plus the
//! principal-component-regression baseline.
//!
//! The pipeline fits the pseudoinverse regressor on labeled source data,
//! estimates the label noise, scores every target eigenvector by comparing
//! its estimated bias against a chi-squared multiple of its variance, and
//! projects the selected directions out of the regressor. Selection uses the
//! inclusive rule: a vector is taken when
//! `quantile(alpha) · Var_{z,j} >= BiasHat_{z,j}`.
//!
//! Target directions whose singular value sits below the rank cutoff carry
//! zero variance and zero estimated bias, so the inclusive rule selects
//! them; they are invisible on the target data, and removing them only
//! strips weight components the target never exercises.

use nalgebra::DVector;

use crate::data::{DataMatrix, Regressor, TargetVector};
use crate::error::{Error, Result};
use crate::risk::{build_ledger, EigenLedger, NoiseModel};
use crate::spectral::{decompose, pinv_from_spectrum, project_out, RankTolerance, Spectrum};
use crate::stats::{chi2_df1_inv_cdf, mle_sigma2, Alpha};

/// The set of target eigenvectors chosen for projection.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SelectionSet {
    indices: Vec<usize>,
    vectors: Vec<DVector<f64>>,
}

impl SelectionSet {
    /// Builds a selection from parallel index/vector lists. Indices must be
    /// strictly ascending; vectors must be orthonormal within 1e-8.
    pub fn new(indices: Vec<usize>, vectors: Vec<DVector<f64>>) -> Result<Self> {
        if indices.len() != vectors.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} indices for {} vectors",
                indices.len(),
                vectors.len()
            )));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(
                "selection indices must be strictly ascending".into(),
            ));
        }
        for i in 0..vectors.len() {
            for j in i..vectors.len() {
                let g = vectors[i].dot(&vectors[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                let deviation = (g - target).abs();
                if deviation > 1e-8 {
                    return Err(Error::NotOrthonormal { i, j, deviation });
                }
            }
        }
        Ok(Self { indices, vectors })
    }

    fn from_flags(spec_z: &Spectrum, flags: &[bool]) -> Self {
        let mut indices = Vec::new();
        let mut vectors = Vec::new();
        for (j, &take) in flags.iter().enumerate() {
            if take {
                indices.push(j);
                vectors.push(spec_z.right_vector(j));
            }
        }
        Self { indices, vectors }
    }

    /// Ascending 0-based positions in the target spectrum.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Everything the adaptation produced: both regressors, the estimated noise,
/// the selection, and the per-eigenvector ledger behind it.
#[derive(Debug, Clone)]
pub struct AdaptationReport {
    pub alpha: Alpha,
    pub sigma2_hat: f64,
    pub weights_ols: Regressor,
    pub weights_spar: Regressor,
    pub selection: SelectionSet,
    pub ledger: EigenLedger,
}

/// Scores every target eigenvector with the estimated bias and selects those
/// below their chi-squared variance threshold.
pub fn select_spar(
    spec_x: &Spectrum,
    spec_z: &Spectrum,
    w_hat: &Regressor,
    sigma2: f64,
    alpha: Alpha,
    tol: RankTolerance,
) -> Result<(SelectionSet, EigenLedger)> {
    let noise = NoiseModel::new(sigma2)?;
    let mut ledger = build_ledger(spec_x, spec_z, &noise, None, Some(w_hat), tol)?;
    let threshold = chi2_df1_inv_cdf(alpha);
    let mut flags = Vec::with_capacity(ledger.len());
    for entry in ledger.entries_mut() {
        let bias_hat = entry.bias_hat.unwrap_or(0.0);
        let take = threshold * entry.var >= bias_hat;
        entry.selected = take;
        flags.push(take);
    }
    Ok((SelectionSet::from_flags(spec_z, &flags), ledger))
}

/// Oracle selection: with the true labeling vector in hand, take every
/// eigenvector whose variance loss is at least its bias loss. Projecting
/// this set out is risk-optimal among all projected regressors.
pub fn select_oracle(
    spec_x: &Spectrum,
    spec_z: &Spectrum,
    w_star: &Regressor,
    sigma2: f64,
    tol: RankTolerance,
) -> Result<SelectionSet> {
    let noise = NoiseModel::new(sigma2)?;
    let ledger = build_ledger(spec_x, spec_z, &noise, Some(w_star), None, tol)?;
    let flags: Vec<bool> = ledger
        .entries()
        .iter()
        .map(|e| e.var >= e.bias.unwrap_or(0.0))
        .collect();
    Ok(SelectionSet::from_flags(spec_z, &flags))
}

/// The full adaptation pipeline with the noise variance estimated from the
/// training residuals by maximum likelihood.
pub fn spar_adapt(
    x: &DataMatrix,
    y: &TargetVector,
    z: &DataMatrix,
    alpha: Alpha,
    tol: RankTolerance,
) -> Result<AdaptationReport> {
    spar_adapt_with_sigma2(x, y, z, alpha, None, tol)
}

/// As [`spar_adapt`], but a known noise variance may be supplied instead of
/// the maximum-likelihood estimate (useful for verification runs).
pub fn spar_adapt_with_sigma2(
    x: &DataMatrix,
    y: &TargetVector,
    z: &DataMatrix,
    alpha: Alpha,
    sigma2: Option<f64>,
    tol: RankTolerance,
) -> Result<AdaptationReport> {
    if x.n_cols() != z.n_cols() {
        return Err(Error::DimensionMismatch(format!(
            "train feature dimension {} vs test feature dimension {}",
            x.n_cols(),
            z.n_cols()
        )));
    }
    let spec_x = decompose(x, tol)?;
    let w_hat = pinv_from_spectrum(&spec_x, y, tol)?;
    let sigma2_hat = match sigma2 {
        Some(v) => NoiseModel::new(v)?.sigma2(),
        None => mle_sigma2(x, y, &w_hat)?,
    };
    let spec_z = decompose(z, tol)?;
    let (selection, ledger) = select_spar(&spec_x, &spec_z, &w_hat, sigma2_hat, alpha, tol)?;
    let weights_spar = project_out(&w_hat, selection.vectors())?;
    Ok(AdaptationReport {
        alpha,
        sigma2_hat,
        weights_ols: w_hat,
        weights_spar,
        selection,
        ledger,
    })
}

/// Principal component regression: the least-squares solution on data
/// projected onto the top-k right singular vectors of `x`, expressed back in
/// the original coordinates. Components are uncentered, matching the
/// uncentered covariance convention used everywhere else in this crate.
pub fn pcr_fit(x: &DataMatrix, y: &TargetVector, k: usize) -> Result<Regressor> {
    if k < 1 || k > x.n_cols() {
        return Err(Error::Domain(format!(
            "component count must lie in 1..={}, got {k}",
            x.n_cols()
        )));
    }
    if y.len() != x.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} targets for {} rows",
            y.len(),
            x.n_rows()
        )));
    }
    let tol = RankTolerance::default();
    let spectrum = decompose(x, tol)?;
    let cutoff = spectrum.positive_cutoff(tol);
    let mut w = DVector::zeros(x.n_cols());
    for (i, &s) in spectrum.singular_values().iter().enumerate().take(k) {
        if s > cutoff {
            let c = spectrum.left_vectors().column(i).dot(y.vector()) / s;
            w.axpy(c, &spectrum.right_vectors().column(i), 1.0);
        }
    }
    Ok(Regressor::from_vector(w))
}
