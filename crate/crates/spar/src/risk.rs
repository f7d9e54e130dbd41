//! Closed-form out-of-distribution risk of (projected) least-squares
//! regressors, decomposed over the target eigenspectrum, plus the spectral
//! inflation diagnostic.
//!
//! For source spectrum {λ_{x,i}, e_{x,i}} and target spectrum
//! {λ_{z,j}, e_{z,j}}, each target eigenvector contributes one of two losses:
//!
//! * kept: Var_j = σ² Σ_i (λ²_{z,j} / λ²_{x,i}) ⟨e_{x,i}, e_{z,j}⟩² over
//!   source directions with positive λ_{x,i},
//! * projected out: Bias_j = ⟨w*, e_{z,j}⟩² λ²_{z,j}.
//!
//! The expected squared error of a regressor that projects out a set S of
//! target eigenvectors is Σ_{j∉S} Var_j + Σ_{j∈S} Bias_j; with S empty this
//! is the plain pseudoinverse-regressor risk. Every quantity depends only on
//! squared inner products, so singular-vector sign choices cannot affect it.

use nalgebra::DVector;

use crate::data::Regressor;
use crate::error::{Error, Result};
use crate::spectral::{RankTolerance, Spectrum};

/// Variance of the training label noise, σ² ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    sigma2: f64,
}

impl NoiseModel {
    pub fn new(sigma2: f64) -> Result<Self> {
        if !sigma2.is_finite() || sigma2 < 0.0 {
            return Err(Error::Domain(format!(
                "noise variance must be a nonnegative finite number, got {sigma2}"
            )));
        }
        Ok(Self { sigma2 })
    }

    pub fn sigma2(self) -> f64 {
        self.sigma2
    }
}

/// Per-eigenvector record of the loss decomposition.
///
/// `bias` requires the true labeling vector and is only present on the
/// oracle/diagnostic path; `bias_hat` is its estimate from the fitted
/// regressor. Target directions whose λ_{z,j} falls below the rank cutoff
/// keep their entry with `var = 0` and `bias_hat = 0` so downstream
/// selection sees a complete index set.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerEntry {
    /// Position in the descending-eigenvalue ordering of the target spectrum.
    pub index: usize,
    pub lambda_z_sq: f64,
    pub var: f64,
    pub bias: Option<f64>,
    pub bias_hat: Option<f64>,
    pub selected: bool,
}

/// The complete per-eigenvector ledger, ordered by descending λ²_{z,j}.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EigenLedger {
    entries: Vec<LedgerEntry>,
}

impl EigenLedger {
    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [LedgerEntry] {
        &mut self.entries
    }
}

fn check_unit(e: &DVector<f64>) -> Result<()> {
    let norm = e.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Domain(format!(
            "expected a unit vector, got norm {norm}"
        )));
    }
    Ok(())
}

fn check_feature_dim(spec: &Spectrum, e: &DVector<f64>) -> Result<()> {
    if e.len() != spec.n_cols() {
        return Err(Error::DimensionMismatch(format!(
            "vector of dimension {} against spectrum with feature dimension {}",
            e.len(),
            spec.n_cols()
        )));
    }
    Ok(())
}

/// Noise amplification suffered along one target eigenvector if it is kept:
/// σ² Σ_i (λ²_{z,j} / λ²_{x,i}) ⟨e_{x,i}, e_{z,j}⟩², summing over source
/// directions whose singular value is positive under `tol`.
pub fn variance_term(
    spec_x: &Spectrum,
    e_zj: &DVector<f64>,
    lambda_zj: f64,
    noise: &NoiseModel,
    tol: RankTolerance,
) -> Result<f64> {
    check_feature_dim(spec_x, e_zj)?;
    check_unit(e_zj)?;
    let cutoff = spec_x.positive_cutoff(tol);
    let lambda_z_sq = lambda_zj * lambda_zj;
    let mut sum = 0.0;
    for (i, &s) in spec_x.singular_values().iter().enumerate() {
        if s > cutoff {
            let dot = spec_x.right_vectors().column(i).dot(e_zj);
            sum += lambda_z_sq / (s * s) * (dot * dot);
        }
    }
    Ok(noise.sigma2() * sum)
}

/// Signal lost along one target eigenvector if it is projected out:
/// ⟨w*, e_{z,j}⟩² λ²_{z,j}.
pub fn bias_term(w_star: &Regressor, e_zj: &DVector<f64>, lambda_zj: f64) -> Result<f64> {
    if w_star.len() != e_zj.len() {
        return Err(Error::DimensionMismatch(format!(
            "regressor of dimension {} against vector of dimension {}",
            w_star.len(),
            e_zj.len()
        )));
    }
    let dot = w_star.vector().dot(e_zj);
    Ok(dot * dot * lambda_zj * lambda_zj)
}

/// The bias estimate with the fitted regressor substituted for the unknown
/// true one. Same formula as [`bias_term`]; kept separate so oracle checks
/// never conflate the true loss with its estimate.
pub fn bias_hat(w_hat: &Regressor, e_zj: &DVector<f64>, lambda_zj: f64) -> Result<f64> {
    bias_term(w_hat, e_zj, lambda_zj)
}

/// Expected OOD squared error of the pseudoinverse regressor:
/// σ² Σ_i Σ_j (λ²_{z,j} / λ²_{x,i}) ⟨e_{x,i}, e_{z,j}⟩² 1[λ_{x,i} > 0].
pub fn ols_ood_risk(
    spec_x: &Spectrum,
    spec_z: &Spectrum,
    noise: &NoiseModel,
    tol: RankTolerance,
) -> Result<f64> {
    if spec_x.n_cols() != spec_z.n_cols() {
        return Err(Error::DimensionMismatch(format!(
            "source feature dimension {} vs target feature dimension {}",
            spec_x.n_cols(),
            spec_z.n_cols()
        )));
    }
    let cutoff_x = spec_x.positive_cutoff(tol);
    let mut total = 0.0;
    for (i, &sx) in spec_x.singular_values().iter().enumerate() {
        if sx <= cutoff_x {
            continue;
        }
        let inv_sq = 1.0 / (sx * sx);
        let ex = spec_x.right_vectors().column(i);
        for (j, &sz) in spec_z.singular_values().iter().enumerate() {
            let dot = ex.dot(&spec_z.right_vectors().column(j));
            total += sz * sz * inv_sq * (dot * dot);
        }
    }
    Ok(noise.sigma2() * total)
}

/// Builds the full ledger. Bias columns are filled for whichever regressors
/// are supplied; `selected` flags start false.
pub(crate) fn build_ledger(
    spec_x: &Spectrum,
    spec_z: &Spectrum,
    noise: &NoiseModel,
    w_star: Option<&Regressor>,
    w_hat: Option<&Regressor>,
    tol: RankTolerance,
) -> Result<EigenLedger> {
    if spec_x.n_cols() != spec_z.n_cols() {
        return Err(Error::DimensionMismatch(format!(
            "source feature dimension {} vs target feature dimension {}",
            spec_x.n_cols(),
            spec_z.n_cols()
        )));
    }
    let cutoff_z = spec_z.positive_cutoff(tol);
    let mut entries = Vec::with_capacity(spec_z.n_vectors());
    for (j, &sz) in spec_z.singular_values().iter().enumerate() {
        let e_zj = spec_z.right_vector(j);
        let lambda_z_sq = sz * sz;
        let positive = sz > cutoff_z;
        let var = if positive {
            variance_term(spec_x, &e_zj, sz, noise, tol)?
        } else {
            0.0
        };
        let bias = match w_star {
            Some(w) => Some(bias_term(w, &e_zj, sz)?),
            None => None,
        };
        let bias_hat_value = match w_hat {
            Some(w) if positive => Some(bias_hat(w, &e_zj, sz)?),
            Some(_) => Some(0.0),
            None => None,
        };
        entries.push(LedgerEntry {
            index: j,
            lambda_z_sq,
            var,
            bias,
            bias_hat: bias_hat_value,
            selected: false,
        });
    }
    Ok(EigenLedger { entries })
}

/// Expected OOD squared error of the regressor that projects out the target
/// eigenvectors in `selected` (0-based positions in the descending-λ²
/// ordering), together with the populated ledger. Requires the true labeling
/// vector; this is the oracle/diagnostic route.
pub fn projected_risk(
    spec_x: &Spectrum,
    spec_z: &Spectrum,
    noise: &NoiseModel,
    w_star: &Regressor,
    selected: &[usize],
    tol: RankTolerance,
) -> Result<(f64, EigenLedger)> {
    let mut ledger = build_ledger(spec_x, spec_z, noise, Some(w_star), None, tol)?;
    let len = ledger.len();
    for &j in selected {
        if j >= len {
            return Err(Error::IndexOutOfRange { index: j, len });
        }
        ledger.entries_mut()[j].selected = true;
    }
    let mut total = 0.0;
    for entry in ledger.entries() {
        if entry.selected {
            total += entry.bias.unwrap_or(0.0);
        } else {
            total += entry.var;
        }
    }
    Ok((total, ledger))
}

/// One row of the spectral inflation profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InflationPoint {
    pub index: usize,
    pub lambda_z_sq: f64,
    /// Var_{z,j} divided by the number of target rows, so profiles from
    /// test sets of different sizes are comparable.
    pub normalized_var: f64,
}

/// Per-eigenvector variance normalized by the target sample count, ordered
/// by descending λ_{z,j}. Large values flag directions whose test-time
/// variance dwarfs anything the training data showed nearby.
pub fn inflation_profile(
    spec_x: &Spectrum,
    spec_z: &Spectrum,
    noise: &NoiseModel,
    tol: RankTolerance,
) -> Result<Vec<InflationPoint>> {
    let ledger = build_ledger(spec_x, spec_z, noise, None, None, tol)?;
    let m = spec_z.n_rows() as f64;
    Ok(ledger
        .entries()
        .iter()
        .map(|e| InflationPoint {
            index: e.index,
            lambda_z_sq: e.lambda_z_sq,
            normalized_var: e.var / m,
        })
        .collect())
}
