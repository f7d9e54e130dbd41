//! Spectral adaptation of least-squares regressors under covariate shift.
//!
//! A regressor fit on source data can fail badly when the test inputs put
//! large variance along directions the training inputs barely exercised.
//! This crate computes the closed-form out-of-distribution risk of the
//! pseudoinverse regressor from the source and target eigenspectra, scores
//! every target eigendirection by the loss it contributes if kept (noise
//! amplification) versus projected out (lost signal), and removes the
//! directions whose estimated bias falls below a chi-squared quantile of
//! their variance. The result is a regressor tailored to the specific shift
//! shown by the unlabeled test data.
//!
//! Modules:
//!
//! * [`data`] — matrices, targets, regressors, CSV and JSON formats,
//! * [`spectral`] — SVD, pseudoinverse solve, subspace projection,
//! * [`risk`] — per-eigenvector bias/variance ledger and risk formulas,
//! * [`stats`] — erf/erfc, chi-squared df=1 quantile, Marcum Q of order 1/2,
//!   inclusion probability, noise-variance MLE,
//! * [`adapt`] — eigenvector selection, the adaptation pipeline, PCR,
//! * [`synth`] — seeded synthetic experiments and the benchmark table,
//! * [`verify`] — Monte Carlo checks of every closed form above.

pub mod adapt;
pub mod data;
pub mod error;
pub mod risk;
pub mod spectral;
pub mod stats;
pub mod synth;
pub mod verify;

pub use adapt::{pcr_fit, select_oracle, select_spar, spar_adapt, spar_adapt_with_sigma2, AdaptationReport, SelectionSet};
pub use data::{load_matrix, load_report, load_targets, save_matrix, save_report, save_targets, DataMatrix, Regressor, ReportFile, TargetVector};
pub use error::{Error, Result};
pub use risk::{bias_hat, bias_term, inflation_profile, ols_ood_risk, projected_risk, variance_term, EigenLedger, InflationPoint, LedgerEntry, NoiseModel};
pub use spectral::{decompose, pinv_from_spectrum, pinv_solve, project_out, RankTolerance, Spectrum};
pub use stats::{chi2_df1_cdf, chi2_df1_inv_cdf, inclusion_probability, marcum_q_half, mle_sigma2, Alpha};
pub use synth::{experiment_config, generate, run_config, run_experiment, run_table1, SyntheticConfig};
pub use verify::{verify_theorems, VerificationReport};
