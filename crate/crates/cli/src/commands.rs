//! Implementations of the CLI subcommands.
//!
//! Every output file is written atomically (temp file in the target
//! directory, then rename), so a crashed run never leaves a truncated
//! artifact behind.

use std::fs::{self, File};
use std::io::Write as _;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use thiserror::Error;

use forestloss::fit::{
    fit_abg, fit_bhf, fit_ci, fit_fsplh, fitted_param_count, FitOutcome, SimplexConfig,
    DEFAULT_ABG_GAMMA, FIT_ORDER,
};
use forestloss::ingest::{build_dataset, load_measurements, SiteConfig};
use forestloss::models::{
    predict, DistanceM, FrequencyGhz, ModelKind, ModelParams, UnknownModelError,
};
use forestloss::samples::{read_samples_csv, write_samples_csv, PathLossSample};
use forestloss::synth::{distance_grid, generate, Spacing, SynthSpec};

use crate::report::{
    compare_reports, render_table, sample_digest, to_json_6dp, EntryStatus, FitReport,
    ModelEntry, SCHEMA_VERSION,
};

/// Command failures, split by exit code: input/usage problems exit with
/// 2, internal numerical failures with 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

fn input_err(context: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", context.display()))
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| input_err(path, e))?;
    tmp.write_all(bytes).map_err(|e| input_err(path, e))?;
    tmp.persist(path).map_err(|e| input_err(path, e))?;
    Ok(())
}

pub fn cmd_ingest(site: &Path, measurements: &Path, output: &Path) -> Result<(), CliError> {
    let site_cfg = File::open(site)
        .map_err(|e| input_err(site, e))
        .and_then(|f| SiteConfig::from_json_reader(f).map_err(|e| input_err(site, e)))?;
    let records = File::open(measurements)
        .map_err(|e| input_err(measurements, e))
        .and_then(|f| load_measurements(f).map_err(|e| input_err(measurements, e)))?;

    let (samples, drops) = build_dataset(&site_cfg, &records);
    let mut csv = Vec::new();
    write_samples_csv(&mut csv, &samples).map_err(|e| input_err(output, e))?;
    atomic_write(output, &csv)?;

    eprintln!(
        "ingest: {} records -> {} samples; dropped below min distance: {}; \
         rsrp outside typical range: {}",
        drops.records_in, drops.samples_out, drops.dropped_below_min_distance, drops.suspect_rsrp
    );
    Ok(())
}

fn parse_model_list(models: &str) -> Result<Vec<ModelKind>, CliError> {
    let mut requested = Vec::new();
    for name in models.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let kind: ModelKind = name
            .parse()
            .map_err(|e: UnknownModelError| CliError::Input(e.to_string()))?;
        if !FIT_ORDER.contains(&kind) {
            return Err(CliError::Input(format!(
                "model `{name}` is not fittable; choose from ci, abg, fsplh, bhf"
            )));
        }
        if !requested.contains(&kind) {
            requested.push(kind);
        }
    }
    if requested.is_empty() {
        return Err(CliError::Input("no models requested".into()));
    }
    Ok(FIT_ORDER
        .iter()
        .copied()
        .filter(|k| requested.contains(k))
        .collect())
}

pub fn cmd_fit(
    samples_path: &Path,
    freq_ghz: f64,
    models: &str,
    output: &Path,
    site_label: Option<&str>,
) -> Result<(), CliError> {
    let frequency = FrequencyGhz::new(freq_ghz).map_err(|e| CliError::Input(e.to_string()))?;
    let kinds = parse_model_list(models)?;
    let bytes = fs::read(samples_path).map_err(|e| input_err(samples_path, e))?;
    let samples = read_samples_csv(&bytes[..]).map_err(|e| input_err(samples_path, e))?;

    let cfg = SimplexConfig::default();
    let outcomes: Vec<FitOutcome> = kinds
        .iter()
        .map(|&kind| {
            let result = match kind {
                ModelKind::Ci => fit_ci(&samples, frequency),
                ModelKind::Abg => fit_abg(&samples, frequency, DEFAULT_ABG_GAMMA),
                ModelKind::FsplH => fit_fsplh(&samples, frequency, &cfg),
                ModelKind::Bhf => fit_bhf(&samples, frequency),
                _ => unreachable!("parse_model_list only passes fittable models"),
            };
            FitOutcome {
                model: kind,
                n_params: fitted_param_count(kind),
                result,
            }
        })
        .collect();

    let label = match site_label {
        Some(l) => l.to_string(),
        None => samples_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "samples".to_string()),
    };
    let entries: Vec<ModelEntry> = outcomes.iter().map(ModelEntry::from_outcome).collect();
    let ok_count = entries
        .iter()
        .filter(|e| e.status == EntryStatus::Ok)
        .count();
    let report = FitReport {
        schema_version: SCHEMA_VERSION,
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        site_label: label,
        frequency_ghz: frequency.ghz(),
        n_points: samples.len(),
        input_digest: sample_digest(&bytes),
        generated_at: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
        models: entries,
    };
    atomic_write(output, &to_json_6dp(&report))?;
    eprintln!(
        "fit: wrote {} ({ok_count}/{} models ok)",
        output.display(),
        kinds.len()
    );

    if ok_count == 0 {
        return Err(CliError::Numerical(
            "all model fits failed; see the report for per-model errors".into(),
        ));
    }
    Ok(())
}

pub fn cmd_predict(
    params: &ModelParams,
    freq_ghz: f64,
    d_min: f64,
    d_max: f64,
    steps: usize,
    output: &Path,
) -> Result<(), CliError> {
    let frequency = FrequencyGhz::new(freq_ghz).map_err(|e| CliError::Input(e.to_string()))?;
    if !(d_min.is_finite() && d_min > 0.0) {
        return Err(CliError::Input(format!("--d-min must be > 0, got {d_min}")));
    }
    if !(d_max.is_finite() && d_max >= d_min) {
        return Err(CliError::Input(format!(
            "--d-max must be >= --d-min ({d_min}), got {d_max}"
        )));
    }
    if steps == 0 {
        return Err(CliError::Input("--steps must be >= 1".into()));
    }

    let curve: Vec<PathLossSample> = distance_grid(d_min, d_max, steps, Spacing::Log)
        .into_iter()
        .map(|d| {
            let distance = DistanceM::new(d).expect("grid stays within validated range");
            PathLossSample {
                distance,
                path_loss: predict(params, distance, frequency),
            }
        })
        .collect();

    let mut csv = Vec::new();
    write_samples_csv(&mut csv, &curve).map_err(|e| input_err(output, e))?;
    atomic_write(output, &csv)?;
    eprintln!("predict: wrote {} ({} points)", output.display(), curve.len());
    Ok(())
}

fn parse_spacing(spacing: &str) -> Result<Spacing, CliError> {
    match spacing {
        "linear" => Ok(Spacing::Linear),
        "log" => Ok(Spacing::Log),
        other => Err(CliError::Input(format!(
            "unknown spacing `{other}`; expected `linear` or `log`"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_synth(
    params: &ModelParams,
    freq_ghz: f64,
    d_min: f64,
    d_max: f64,
    points: usize,
    sigma_db: f64,
    seed: u64,
    spacing: &str,
    output: &Path,
) -> Result<(), CliError> {
    let frequency = FrequencyGhz::new(freq_ghz).map_err(|e| CliError::Input(e.to_string()))?;
    let spec = SynthSpec {
        params: *params,
        frequency,
        d_min_m: d_min,
        d_max_m: d_max,
        n_points: points,
        sigma_db,
        seed,
        spacing: parse_spacing(spacing)?,
    };
    let samples = generate(&spec).map_err(|e| CliError::Input(e.to_string()))?;

    let mut csv = Vec::new();
    write_samples_csv(&mut csv, &samples).map_err(|e| input_err(output, e))?;
    atomic_write(output, &csv)?;

    // Echo the spec next to the dataset for provenance.
    let mut sidecar = output.as_os_str().to_os_string();
    sidecar.push(".spec.json");
    let sidecar = PathBuf::from(sidecar);
    atomic_write(&sidecar, &to_json_6dp(&spec))?;

    eprintln!(
        "synth: wrote {} ({} samples) and {}",
        output.display(),
        samples.len(),
        sidecar.display()
    );
    Ok(())
}

pub fn cmd_compare(reports: &[PathBuf], output: Option<&Path>) -> Result<(), CliError> {
    let mut parsed = Vec::with_capacity(reports.len());
    for path in reports {
        let bytes = fs::read(path).map_err(|e| input_err(path, e))?;
        let report: FitReport =
            serde_json::from_slice(&bytes).map_err(|e| input_err(path, e))?;
        parsed.push(report);
    }
    let comparison = compare_reports(&parsed).map_err(CliError::Input)?;

    print!("{}", render_table(&comparison));
    if let Some(path) = output {
        atomic_write(path, &to_json_6dp(&comparison))?;
        eprintln!("compare: wrote {}", path.display());
    }
    Ok(())
}
