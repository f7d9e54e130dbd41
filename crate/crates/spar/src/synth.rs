//! Synthetic covariate-shift experiments: seeded Gaussian data generation
//! and the four-preset benchmark table.
//!
//! All randomness flows from a single 64-bit seed through a ChaCha12 stream;
//! draws are consumed in a fixed order (train matrix row-major, then label
//! noise, then test matrix row-major), so two runs with the same seed are
//! byte-identical, and two experiments that share a seed and covariances see
//! the same covariates and noise regardless of their labeling vector.

use serde::{Deserialize, Serialize};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::adapt::{pcr_fit, spar_adapt};
use crate::data::{DataMatrix, Regressor, TargetVector};
use crate::error::{Error, Result};
use crate::spectral::{pinv_solve, RankTolerance};
use crate::stats::Alpha;

/// Sample count for train and test in the benchmark presets.
///
/// The presets fix N = M = 4000 and σ² = 1. With the published covariances
/// this puts the no-adaptation risk near 4e6 under shift and near 2 without,
/// and separates the baseline regressors by two orders of magnitude in the
/// no-shift setting, so the benchmark assertions have wide margins.
pub const PRESET_SAMPLES: usize = 4000;

/// Label noise variance for the benchmark presets.
pub const PRESET_SIGMA2: f64 = 1.0;

/// Rejection confidence used by the benchmark presets.
pub const PRESET_ALPHA: f64 = 0.999;

/// A fully specified synthetic instance: diagonal Gaussian covariates for
/// train and test, a labeling vector, label noise, and the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n_train: usize,
    pub n_test: usize,
    /// Per-feature variances of the training distribution.
    pub var_x: Vec<f64>,
    /// Per-feature variances of the test distribution.
    pub var_z: Vec<f64>,
    pub w_star: Vec<f64>,
    pub sigma2: f64,
    pub seed: u64,
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        let d = self.w_star.len();
        if d == 0 {
            return Err(Error::BadConfig("w_star must be non-empty".into()));
        }
        if self.var_x.len() != d || self.var_z.len() != d {
            return Err(Error::BadConfig(format!(
                "var_x ({}), var_z ({}) and w_star ({d}) must agree in length",
                self.var_x.len(),
                self.var_z.len()
            )));
        }
        if self.n_train == 0 || self.n_test == 0 {
            return Err(Error::BadConfig("sample counts must be positive".into()));
        }
        for (name, vars) in [("var_x", &self.var_x), ("var_z", &self.var_z)] {
            if vars.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::BadConfig(format!("{name} must be nonnegative")));
            }
        }
        if !self.sigma2.is_finite() || self.sigma2 < 0.0 {
            return Err(Error::BadConfig("sigma2 must be nonnegative".into()));
        }
        if self.w_star.iter().any(|v| !v.is_finite()) {
            return Err(Error::BadConfig("w_star must be finite".into()));
        }
        Ok(())
    }
}

/// Draws `(X, Y_X, Z, Y_Z)`: train rows from N(0, diag(var_x)) with noisy
/// labels, test rows from N(0, diag(var_z)) with noiseless labels.
pub fn generate(
    cfg: &SyntheticConfig,
) -> Result<(DataMatrix, TargetVector, DataMatrix, TargetVector)> {
    cfg.validate()?;
    let d = cfg.w_star.len();
    let std_x: Vec<f64> = cfg.var_x.iter().map(|v| v.sqrt()).collect();
    let std_z: Vec<f64> = cfg.var_z.iter().map(|v| v.sqrt()).collect();
    let sigma = cfg.sigma2.sqrt();
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);

    let mut xv = Vec::with_capacity(cfg.n_train * d);
    for _ in 0..cfg.n_train {
        for s in &std_x {
            xv.push(rng.sample::<f64, _>(StandardNormal) * s);
        }
    }
    let x = DataMatrix::from_rows(cfg.n_train, d, &xv)?;

    let w_star = Regressor::from_weights(&cfg.w_star)?;
    let clean = x.predict(&w_star)?;
    let noisy: Vec<f64> = clean
        .values()
        .iter()
        .map(|v| v + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let y = TargetVector::from_values(&noisy)?;

    let mut zv = Vec::with_capacity(cfg.n_test * d);
    for _ in 0..cfg.n_test {
        for s in &std_z {
            zv.push(rng.sample::<f64, _>(StandardNormal) * s);
        }
    }
    let z = DataMatrix::from_rows(cfg.n_test, d, &zv)?;
    let y_z = z.predict(&w_star)?;

    Ok((x, y, z, y_z))
}

fn labeling_vector(experiment: u8) -> Vec<f64> {
    match experiment {
        1 => vec![0.01, 0.99999995],
        2 => vec![0.9999995, 0.01],
        // Experiments 3 and 4 share the mixed labeling vector.
        _ => vec![1.0 / 5f64.sqrt(), 2.0 / 5f64.sqrt()],
    }
}

/// The preset instance for one of the four benchmark experiments.
///
/// Experiments 1-3 shift the covariates from per-feature variances
/// (5, 1e-5) to (1, 40) and differ only in the labeling vector; experiment 4
/// keeps train and test matched at (1, 40).
pub fn experiment_config(experiment: u8, seed: u64) -> Result<SyntheticConfig> {
    if !(1..=4).contains(&experiment) {
        return Err(Error::BadConfig(format!(
            "experiment must be 1, 2, 3, or 4, got {experiment}"
        )));
    }
    let var_x = if experiment == 4 {
        vec![1.0, 40.0]
    } else {
        vec![5.0, 1e-5]
    };
    Ok(SyntheticConfig {
        n_train: PRESET_SAMPLES,
        n_test: PRESET_SAMPLES,
        var_x,
        var_z: vec![1.0, 40.0],
        w_star: labeling_vector(experiment),
        sigma2: PRESET_SIGMA2,
        seed,
    })
}

/// Squared errors of the three regression methods on one draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedOutcome {
    pub seed: u64,
    pub ols_loss: f64,
    pub pcr_loss: f64,
    pub spar_loss: f64,
    /// Size of the selected set on this draw.
    pub selected: usize,
}

fn evaluate(
    x: &DataMatrix,
    y: &TargetVector,
    z: &DataMatrix,
    y_z: &TargetVector,
    seed: u64,
) -> Result<SeedOutcome> {
    let tol = RankTolerance::default();
    let alpha = Alpha::new(PRESET_ALPHA)?;

    let w_ols = pinv_solve(x, y, tol)?;
    let ols_loss = y_z.squared_error(&z.predict(&w_ols)?)?;

    let w_pcr = pcr_fit(x, y, 1)?;
    let pcr_loss = y_z.squared_error(&z.predict(&w_pcr)?)?;

    let report = spar_adapt(x, y, z, alpha, tol)?;
    let spar_loss = y_z.squared_error(&z.predict(&report.weights_spar)?)?;

    Ok(SeedOutcome {
        seed,
        ols_loss,
        pcr_loss,
        spar_loss,
        selected: report.selection.len(),
    })
}

/// Runs one preset experiment over seeds `0..seeds`.
pub fn run_experiment(experiment: u8, seeds: usize) -> Result<Vec<SeedOutcome>> {
    if seeds == 0 {
        return Err(Error::BadConfig("need at least one seed".into()));
    }
    (0..seeds as u64)
        .map(|seed| {
            let cfg = experiment_config(experiment, seed)?;
            let (x, y, z, y_z) = generate(&cfg)?;
            evaluate(&x, &y, &z, &y_z, seed)
        })
        .collect()
}

/// Runs the three methods on seeds `cfg.seed .. cfg.seed + seeds` of a
/// custom configuration.
pub fn run_config(cfg: &SyntheticConfig, seeds: usize) -> Result<Vec<SeedOutcome>> {
    if seeds == 0 {
        return Err(Error::BadConfig("need at least one seed".into()));
    }
    (0..seeds as u64)
        .map(|offset| {
            let seed = cfg.seed.wrapping_add(offset);
            let run = SyntheticConfig { seed, ..cfg.clone() };
            let (x, y, z, y_z) = generate(&run)?;
            evaluate(&x, &y, &z, &y_z, seed)
        })
        .collect()
}

/// One aggregated row of the benchmark table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub experiment: String,
    pub method: &'static str,
    pub mean: f64,
    pub std: f64,
    pub seeds: usize,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Aggregates per-seed outcomes into table rows for the three methods.
pub fn summarize(experiment: &str, outcomes: &[SeedOutcome]) -> Vec<TableRow> {
    let pick = |f: fn(&SeedOutcome) -> f64| outcomes.iter().map(f).collect::<Vec<_>>();
    let methods: [(&'static str, Vec<f64>); 3] = [
        ("ERM", pick(|o| o.ols_loss)),
        ("PCR", pick(|o| o.pcr_loss)),
        ("ERM+SpAR", pick(|o| o.spar_loss)),
    ];
    methods
        .into_iter()
        .map(|(method, losses)| {
            let (mean, std) = mean_std(&losses);
            TableRow {
                experiment: experiment.to_string(),
                method,
                mean,
                std,
                seeds: outcomes.len(),
            }
        })
        .collect()
}

/// Runs all four preset experiments and aggregates the table.
pub fn run_table1(seeds: usize) -> Result<Vec<TableRow>> {
    let mut rows = Vec::with_capacity(12);
    for experiment in 1..=4u8 {
        let outcomes = run_experiment(experiment, seeds)?;
        rows.extend(summarize(&experiment.to_string(), &outcomes));
    }
    Ok(rows)
}
