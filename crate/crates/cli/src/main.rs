//! `forestloss` — forest radio propagation path-loss toolkit.
//!
//! Subcommands cover the full pipeline: `ingest` turns drive-test logs
//! into samples, `fit` estimates model parameters and writes a JSON
//! report, `predict` evaluates fitted curves, `synth` generates seeded
//! synthetic datasets, and `compare` ranks models across sites.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::CliError;
use forestloss::models::{
    AbgParams, BhfParams, CiParams, ItuHParams, ModelKind, ModelParams, UnknownModelError,
};

#[derive(Parser)]
#[command(
    name = "forestloss",
    version,
    about = "Forest radio propagation path-loss toolkit",
    long_about = "Fits and compares path-loss models (CI, ABG, FSPL, ITU-H, FSPL-H, BHF) \
                  on drive-test or synthetic data.\n\nExit codes: 0 success, 2 usage or \
                  input error, 3 internal numerical failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a geotagged RSRP drive-test log into distance/path-loss samples.
    Ingest {
        /// Site config JSON (geometry, frequency, link budget).
        #[arg(long, value_name = "FILE")]
        site: PathBuf,
        /// Measurement CSV with header `lon,lat,alt_m,rsrp_dbm`.
        #[arg(long, value_name = "FILE")]
        measurements: PathBuf,
        /// Output sample CSV.
        #[arg(long, value_name = "FILE")]
        output: PathBuf,
    },
    /// Fit path-loss models to a sample CSV and write a JSON report.
    Fit {
        /// Sample CSV (`distance_m,path_loss_db`).
        #[arg(long, value_name = "FILE")]
        samples: PathBuf,
        /// Carrier frequency in GHz.
        #[arg(long)]
        freq_ghz: f64,
        /// Comma-separated subset of: ci, abg, fsplh, bhf.
        #[arg(long, default_value = "ci,abg,fsplh,bhf")]
        models: String,
        /// Output report JSON.
        #[arg(long, value_name = "FILE")]
        output: PathBuf,
        /// Dataset label used in reports (defaults to the samples file stem).
        #[arg(long)]
        site_label: Option<String>,
    },
    /// Evaluate a model curve over a log-spaced distance range.
    Predict {
        #[command(flatten)]
        model: ModelArgs,
        /// Carrier frequency in GHz.
        #[arg(long)]
        freq_ghz: f64,
        /// Range start, meters.
        #[arg(long)]
        d_min: f64,
        /// Range end, meters.
        #[arg(long)]
        d_max: f64,
        /// Number of curve points.
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// Output curve CSV.
        #[arg(long, value_name = "FILE")]
        output: PathBuf,
    },
    /// Generate a synthetic sample CSV from a model with seeded shadowing.
    Synth {
        #[command(flatten)]
        model: ModelArgs,
        /// Carrier frequency in GHz.
        #[arg(long)]
        freq_ghz: f64,
        /// Range start, meters (at least 1).
        #[arg(long, default_value_t = 5.0)]
        d_min: f64,
        /// Range end, meters.
        #[arg(long, default_value_t = 500.0)]
        d_max: f64,
        /// Number of samples.
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Shadowing standard deviation, dB.
        #[arg(long, default_value_t = 0.0)]
        sigma_db: f64,
        /// Seed for the deterministic noise stream.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Distance grid: `log` or `linear`.
        #[arg(long, default_value = "log")]
        spacing: String,
        /// Output sample CSV; the spec is echoed to `<output>.spec.json`.
        #[arg(long, value_name = "FILE")]
        output: PathBuf,
    },
    /// Compare fit reports across sites (lowest RMSE flagged per site).
    Compare {
        /// Two or more fit-report JSON files.
        #[arg(required = true, num_args = 2..)]
        reports: Vec<PathBuf>,
        /// Optional output path for the comparison JSON.
        #[arg(long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
}

/// Model selector plus its parameters; which flags are required depends
/// on the model.
#[derive(Args)]
struct ModelArgs {
    /// Model: fspl, ci, abg, ituh, fsplh, or bhf.
    #[arg(long)]
    model: String,
    /// CI path loss exponent.
    #[arg(long, allow_negative_numbers = true)]
    n: Option<f64>,
    /// ABG/BHF distance coefficient.
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// ABG/BHF offset, dB.
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// ABG frequency coefficient (defaults to 2).
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// ITU-H/FSPL-H maximum attenuation, dB.
    #[arg(long, allow_negative_numbers = true)]
    a_m: Option<f64>,
    /// ITU-H/FSPL-H specific attenuation, dB per meter.
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    /// BHF vegetation coefficient, dB.
    #[arg(long, allow_negative_numbers = true)]
    zeta: Option<f64>,
}

impl ModelArgs {
    fn to_params(&self) -> Result<ModelParams, CliError> {
        let kind: ModelKind = self
            .model
            .parse()
            .map_err(|e: UnknownModelError| CliError::Input(e.to_string()))?;
        let require = |flag: &str, value: Option<f64>| {
            value.ok_or_else(|| {
                CliError::Input(format!("model `{}` requires --{flag}", self.model))
            })
        };
        let domain = |e: forestloss::models::DomainError| CliError::Input(e.to_string());
        match kind {
            ModelKind::Fspl => Ok(ModelParams::Fspl),
            ModelKind::Ci => Ok(ModelParams::Ci(
                CiParams::new(require("n", self.n)?).map_err(domain)?,
            )),
            ModelKind::Abg => Ok(ModelParams::Abg(
                AbgParams::new(
                    require("alpha", self.alpha)?,
                    require("beta", self.beta)?,
                    self.gamma.unwrap_or(2.0),
                )
                .map_err(domain)?,
            )),
            ModelKind::ItuH => Ok(ModelParams::ItuH(
                ItuHParams::new(require("a-m", self.a_m)?, require("mu", self.mu)?)
                    .map_err(domain)?,
            )),
            ModelKind::FsplH => Ok(ModelParams::FsplH(
                ItuHParams::new(require("a-m", self.a_m)?, require("mu", self.mu)?)
                    .map_err(domain)?,
            )),
            ModelKind::Bhf => Ok(ModelParams::Bhf(
                BhfParams::new(
                    require("alpha", self.alpha)?,
                    require("beta", self.beta)?,
                    require("zeta", self.zeta)?,
                )
                .map_err(domain)?,
            )),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest {
            site,
            measurements,
            output,
        } => commands::cmd_ingest(&site, &measurements, &output),
        Command::Fit {
            samples,
            freq_ghz,
            models,
            output,
            site_label,
        } => commands::cmd_fit(&samples, freq_ghz, &models, &output, site_label.as_deref()),
        Command::Predict {
            model,
            freq_ghz,
            d_min,
            d_max,
            steps,
            output,
        } => {
            let params = model.to_params()?;
            commands::cmd_predict(&params, freq_ghz, d_min, d_max, steps, &output)
        }
        Command::Synth {
            model,
            freq_ghz,
            d_min,
            d_max,
            points,
            sigma_db,
            seed,
            spacing,
            output,
        } => {
            let params = model.to_params()?;
            commands::cmd_synth(
                &params, freq_ghz, d_min, d_max, points, sigma_db, seed, &spacing, &output,
            )
        }
        Command::Compare { reports, output } => {
            commands::cmd_compare(&reports, output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
