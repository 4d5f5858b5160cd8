//! Fit-report and comparison structures, and their JSON form.
//!
//! Reports serialize with a stable key order and every float printed with
//! exactly six decimal places, so reruns on identical inputs diff cleanly
//! (the `generated_at` timestamp is the one field excluded from that
//! guarantee). The `input_digest` ties a report to the exact bytes of the
//! sample file it was computed from.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};
use sha2::{Digest, Sha256};

use forestloss::fit::FitOutcome;
use forestloss::models::ModelParams;

/// Version of the report JSON layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryStatus {
    Ok,
    Error,
}

/// One model's outcome inside a fit report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelEntry {
    pub model: String,
    pub status: EntryStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rmse_db: Option<f64>,
    pub n_params: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_number: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ModelEntry {
    pub fn from_outcome(outcome: &FitOutcome) -> Self {
        match &outcome.result {
            Ok(fit) => ModelEntry {
                model: outcome.model.as_str().to_string(),
                status: EntryStatus::Ok,
                params: Some(param_fields(&fit.params)),
                rmse_db: Some(fit.rmse_db),
                n_params: fit.n_params,
                n_points: Some(fit.n_points),
                condition_number: fit.condition_number,
                converged: fit.converged,
                iterations: fit.iterations,
                error: None,
            },
            Err(e) => ModelEntry {
                model: outcome.model.as_str().to_string(),
                status: EntryStatus::Error,
                params: None,
                rmse_db: None,
                n_params: outcome.n_params,
                n_points: None,
                condition_number: None,
                converged: None,
                iterations: None,
                error: Some(e.to_string()),
            },
        }
    }
}

/// A full fit report: one entry per requested model plus provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub schema_version: u32,
    pub toolkit_version: String,
    pub site_label: String,
    pub frequency_ghz: f64,
    pub n_points: usize,
    /// `sha256:<hex>` over the sample file bytes.
    pub input_digest: String,
    /// RFC 3339 timestamp; excluded from determinism guarantees.
    pub generated_at: String,
    pub models: Vec<ModelEntry>,
}

/// The parameter fields of a model without its `"model"` tag (the report
/// entry already names the model).
fn param_fields(params: &ModelParams) -> serde_json::Value {
    let mut value = serde_json::to_value(params).expect("model params serialize");
    if let serde_json::Value::Object(map) = &mut value {
        map.remove("model");
    }
    value
}

/// Content digest of a sample file.
pub fn sample_digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

/// Pretty JSON with every float printed as `{:.6}`.
struct SixDecimalPretty<'a> {
    inner: PrettyFormatter<'a>,
}

impl SixDecimalPretty<'_> {
    fn new() -> Self {
        Self {
            inner: PrettyFormatter::new(),
        }
    }
}

impl Formatter for SixDecimalPretty<'_> {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.6}")
    }

    fn begin_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_array(writer)
    }

    fn end_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_object(writer)
    }

    fn end_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_object_value(writer)
    }
}

/// Serialize any value as pretty JSON with fixed six-decimal floats and a
/// trailing newline.
pub fn to_json_6dp<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, SixDecimalPretty::new());
    value
        .serialize(&mut ser)
        .expect("report serialization cannot fail");
    out.push(b'\n');
    out
}

/// Cross-site RMSE comparison: rows are models, columns are sites.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Comparison {
    pub schema_version: u32,
    pub models: Vec<String>,
    pub sites: Vec<String>,
    /// `rmse_db[i][j]` is model `i` on site `j`.
    pub rmse_db: Vec<Vec<f64>>,
    /// For each site, the model with the lowest RMSE.
    pub best_per_site: Vec<String>,
}

/// Build a comparison from reports that share a model set (compared over
/// their successful entries).
pub fn compare_reports(reports: &[FitReport]) -> Result<Comparison, String> {
    if reports.len() < 2 {
        return Err(format!(
            "comparison needs at least 2 reports, got {}",
            reports.len()
        ));
    }

    let model_names = |r: &FitReport| -> Vec<String> {
        r.models
            .iter()
            .filter(|m| m.status == EntryStatus::Ok)
            .map(|m| m.model.clone())
            .collect()
    };
    let models = model_names(&reports[0]);
    if models.is_empty() {
        return Err(format!(
            "report `{}` has no successful model fits",
            reports[0].site_label
        ));
    }
    for r in &reports[1..] {
        let mut a = models.clone();
        let mut b = model_names(r);
        a.sort();
        b.sort();
        if a != b {
            return Err(format!(
                "model sets differ: `{}` has {:?}, `{}` has {:?}",
                reports[0].site_label, a, r.site_label, b
            ));
        }
    }

    let sites: Vec<String> = reports.iter().map(|r| r.site_label.clone()).collect();
    let mut rmse_db = Vec::with_capacity(models.len());
    for model in &models {
        let mut row = Vec::with_capacity(reports.len());
        for r in reports {
            let entry = r
                .models
                .iter()
                .find(|m| &m.model == model && m.status == EntryStatus::Ok)
                .expect("model set was checked above");
            row.push(entry.rmse_db.ok_or_else(|| {
                format!("entry `{model}` in `{}` lacks rmse_db", r.site_label)
            })?);
        }
        rmse_db.push(row);
    }

    let best_per_site = (0..sites.len())
        .map(|j| {
            let mut best = 0;
            for i in 1..models.len() {
                if rmse_db[i][j] < rmse_db[best][j] {
                    best = i;
                }
            }
            models[best].clone()
        })
        .collect();

    Ok(Comparison {
        schema_version: SCHEMA_VERSION,
        models,
        sites,
        rmse_db,
        best_per_site,
    })
}

/// Plain-text table: one row per model, one column per site, the lowest
/// RMSE per site marked with `*`.
pub fn render_table(cmp: &Comparison) -> String {
    let model_width = cmp
        .models
        .iter()
        .map(|m| m.len())
        .chain(["model".len()])
        .max()
        .unwrap_or(5);
    let col_widths: Vec<usize> = cmp
        .sites
        .iter()
        .map(|s| s.len().max(12))
        .collect();

    let mut out = String::new();
    out.push_str(&format!("{:<model_width$}", "model"));
    for (site, w) in cmp.sites.iter().zip(&col_widths) {
        out.push_str(&format!("  {site:>w$}"));
    }
    out.push('\n');
    for (i, model) in cmp.models.iter().enumerate() {
        out.push_str(&format!("{model:<model_width$}"));
        for (j, w) in col_widths.iter().enumerate() {
            let marker = if cmp.best_per_site[j] == *model {
                "*"
            } else {
                ""
            };
            let cell = format!("{marker}{:.6}", cmp.rmse_db[i][j]);
            out.push_str(&format!("  {cell:>w$}"));
        }
        out.push('\n');
    }
    out
}
