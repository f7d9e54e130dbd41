//! Command-line interface for spectral regressor adaptation.
//!
//! Exit codes: 0 on success, 1 when verification checks fail, 2 on usage,
//! file, or format errors.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spar::data;
use spar::spectral::{decompose, RankTolerance};
use spar::stats::{mle_sigma2, Alpha};
use spar::synth::{self, SyntheticConfig};
use spar::{inflation_profile, pinv_from_spectrum, NoiseModel};

#[derive(Parser, Debug)]
#[command(name = "spar", version, about = "Spectral adaptation of least-squares regressors under covariate shift")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Adapt a regressor to unlabeled test inputs and write a JSON report.
    Adapt(AdaptArgs),
    /// Write the per-eigenvector spectral inflation profile as CSV.
    Diagnose(DiagnoseArgs),
    /// Run the synthetic covariate-shift benchmark and write a CSV table.
    Synth(SynthArgs),
    /// Monte Carlo verification of the closed-form risk results.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct AdaptArgs {
    /// Training matrix (CSV, rows = samples).
    #[arg(long)]
    train: PathBuf,
    /// Training targets (single-column CSV).
    #[arg(long)]
    targets: PathBuf,
    /// Unlabeled test matrix (CSV, same feature count as training).
    #[arg(long)]
    test: PathBuf,
    /// Rejection confidence in [0, 1).
    #[arg(long, default_value_t = 0.999)]
    alpha: f64,
    /// Output report path (JSON).
    #[arg(long)]
    out: PathBuf,
    /// Use this label-noise variance instead of the maximum-likelihood
    /// estimate from the training residuals.
    #[arg(long)]
    sigma2: Option<f64>,
    /// Relative singular-value threshold for the numerical rank.
    #[arg(long, default_value_t = RankTolerance::DEFAULT_RELATIVE)]
    rank_tol: f64,
    /// Treat the first line of each matrix file as a header.
    #[arg(long)]
    has_header: bool,
}

#[derive(Args, Debug)]
struct DiagnoseArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    targets: PathBuf,
    #[arg(long)]
    test: PathBuf,
    /// Output profile path (CSV with columns j,lambda_z_sq,normalized_var).
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = RankTolerance::DEFAULT_RELATIVE)]
    rank_tol: f64,
    #[arg(long)]
    has_header: bool,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Which preset to run: 1, 2, 3, 4, or "all".
    #[arg(long, conflicts_with = "config")]
    experiment: Option<String>,
    /// Run a custom instance from a JSON configuration file instead.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    seeds: usize,
    /// Output table path (CSV with columns experiment,method,mean,std,seeds).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Noise draws per Monte Carlo estimate (at least 1000).
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn write_text(path: &PathBuf, text: String) -> spar::Result<()> {
    fs::write(path, text).map_err(|source| spar::Error::Io {
        path: path.clone(),
        source,
    })
}

fn run_adapt(args: AdaptArgs) -> spar::Result<()> {
    let alpha = Alpha::new(args.alpha)?;
    let tol = RankTolerance::new(args.rank_tol)?;
    let x = data::load_matrix(&args.train, args.has_header)?;
    let y = data::load_targets(&args.targets)?;
    let z = data::load_matrix(&args.test, args.has_header)?;
    let report = spar::spar_adapt_with_sigma2(&x, &y, &z, alpha, args.sigma2, tol)?;

    let spec_x = decompose(&x, tol)?;
    if spec_x.numerical_rank() < x.n_cols() {
        eprintln!(
            "warning: training matrix is rank deficient ({} of {} directions); \
             the fitted weights are the minimum-norm solution",
            spec_x.numerical_rank(),
            x.n_cols()
        );
    }

    data::save_report(&report, &args.out)?;
    println!(
        "adapted {} -> {}: selected {} of {} target eigenvectors (sigma2 = {:e})",
        args.train.display(),
        args.out.display(),
        report.selection.len(),
        report.ledger.len(),
        report.sigma2_hat
    );
    Ok(())
}

fn run_diagnose(args: DiagnoseArgs) -> spar::Result<()> {
    let tol = RankTolerance::new(args.rank_tol)?;
    let x = data::load_matrix(&args.train, args.has_header)?;
    let y = data::load_targets(&args.targets)?;
    let z = data::load_matrix(&args.test, args.has_header)?;
    let spec_x = decompose(&x, tol)?;
    let w_hat = pinv_from_spectrum(&spec_x, &y, tol)?;
    let sigma2 = mle_sigma2(&x, &y, &w_hat)?;
    let noise = NoiseModel::new(sigma2)?;
    let spec_z = decompose(&z, tol)?;
    let profile = inflation_profile(&spec_x, &spec_z, &noise, tol)?;

    let mut out = String::from("j,lambda_z_sq,normalized_var\n");
    for p in &profile {
        let _ = writeln!(out, "{},{},{}", p.index, p.lambda_z_sq, p.normalized_var);
    }
    write_text(&args.out, out)?;
    println!(
        "wrote {} rows to {} (sigma2 = {:e})",
        profile.len(),
        args.out.display(),
        sigma2
    );
    Ok(())
}

fn run_synth(args: SynthArgs) -> spar::Result<()> {
    let rows = match (&args.experiment, &args.config) {
        (Some(_), Some(_)) => unreachable!("clap rejects conflicting flags"),
        (None, None) => {
            return Err(spar::Error::BadConfig(
                "pass --experiment {1|2|3|4|all} or --config <file>".into(),
            ))
        }
        (Some(exp), None) if exp == "all" => synth::run_table1(args.seeds)?,
        (Some(exp), None) => {
            let id: u8 = exp.parse().map_err(|_| {
                spar::Error::BadConfig(format!("experiment must be 1, 2, 3, 4, or \"all\", got {exp:?}"))
            })?;
            let outcomes = synth::run_experiment(id, args.seeds)?;
            synth::summarize(exp, &outcomes)
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|source| spar::Error::Io {
                path: path.clone(),
                source,
            })?;
            let cfg: SyntheticConfig = serde_json::from_str(&text)
                .map_err(|e| spar::Error::BadConfig(format!("{}: {e}", path.display())))?;
            let outcomes = synth::run_config(&cfg, args.seeds)?;
            synth::summarize("custom", &outcomes)
        }
    };

    let mut out = String::from("experiment,method,mean,std,seeds\n");
    for row in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.experiment, row.method, row.mean, row.std, row.seeds
        );
    }
    write_text(&args.out, out)?;
    for row in &rows {
        println!(
            "experiment {} {:>8}: {:.4e} +- {:.4e} over {} seeds",
            row.experiment, row.method, row.mean, row.std, row.seeds
        );
    }
    Ok(())
}

fn run_verify(args: VerifyArgs) -> spar::Result<bool> {
    let report = spar::verify_theorems(args.trials, args.seed)?;
    for check in &report.checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("{status} {:<45} {}", check.name, check.detail);
    }
    let passed = report.all_passed();
    let (ok, total) = (
        report.checks.iter().filter(|c| c.passed).count(),
        report.checks.len(),
    );
    println!("{ok}/{total} checks passed");
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Adapt(args) => run_adapt(args).map(|()| true),
        Command::Diagnose(args) => run_diagnose(args).map(|()| true),
        Command::Synth(args) => run_synth(args).map(|()| true),
        Command::Verify(args) => run_verify(args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
