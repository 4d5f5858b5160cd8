//! The `(distance, path loss)` sample pair and its CSV form.
//!
//! The CSV layout is shared by ingestion output, synthetic datasets, and
//! predicted curves: a `distance_m,path_loss_db` header followed by one
//! row per sample, both columns printed with six decimal places.

use std::io::{self, BufRead, BufReader, Read, Write};

use serde::Serialize;
use thiserror::Error;

use crate::models::{DistanceM, PathLossDb};

/// Header row of the sample CSV format.
pub const SAMPLE_CSV_HEADER: &str = "distance_m,path_loss_db";

/// One fitting unit: a transmitter-receiver separation and the path loss
/// observed (or synthesized) at that separation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathLossSample {
    pub distance: DistanceM,
    pub path_loss: PathLossDb,
}

#[derive(Debug, Error)]
pub enum SampleCsvError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing header; expected `{SAMPLE_CSV_HEADER}`")]
    MissingHeader,
    #[error("bad header `{0}`; expected `{SAMPLE_CSV_HEADER}`")]
    BadHeader(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Write samples as CSV with six decimal places per column.
pub fn write_samples_csv<W: Write>(mut writer: W, samples: &[PathLossSample]) -> io::Result<()> {
    writeln!(writer, "{SAMPLE_CSV_HEADER}")?;
    for s in samples {
        writeln!(writer, "{:.6},{:.6}", s.distance.meters(), s.path_loss.db())?;
    }
    Ok(())
}

/// Read a sample CSV, validating the header and every row.
///
/// Line numbers in errors are 1-based and count the header.
pub fn read_samples_csv<R: Read>(reader: R) -> Result<Vec<PathLossSample>, SampleCsvError> {
    let mut lines = BufReader::new(reader).lines();
    let header = lines.next().ok_or(SampleCsvError::MissingHeader)??;
    if header.trim() != SAMPLE_CSV_HEADER {
        return Err(SampleCsvError::BadHeader(header.trim().to_string()));
    }

    let mut samples = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let distance = parse_field(&mut fields, "distance_m", line_no)?;
        let path_loss = parse_field(&mut fields, "path_loss_db", line_no)?;
        if fields.next().is_some() {
            return Err(SampleCsvError::Parse {
                line: line_no,
                message: "expected 2 fields".to_string(),
            });
        }
        let distance = DistanceM::new(distance).map_err(|e| SampleCsvError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if !path_loss.is_finite() {
            return Err(SampleCsvError::Parse {
                line: line_no,
                message: format!("path_loss_db must be finite, got {path_loss}"),
            });
        }
        samples.push(PathLossSample {
            distance,
            path_loss: PathLossDb::new(path_loss),
        });
    }
    Ok(samples)
}

fn parse_field<'a>(
    fields: &mut impl Iterator<Item = &'a str>,
    name: &str,
    line_no: usize,
) -> Result<f64, SampleCsvError> {
    let raw = fields.next().ok_or_else(|| SampleCsvError::Parse {
        line: line_no,
        message: format!("missing field `{name}`"),
    })?;
    raw.trim().parse::<f64>().map_err(|_| SampleCsvError::Parse {
        line: line_no,
        message: format!("invalid {name} `{}`", raw.trim()),
    })
}
