//! Drive-test log ingestion: site geometry, link budget, and dataset
//! assembly.
//!
//! Raw measurement logs carry geotagged RSRP readings. This module turns
//! them into `(distance, path loss)` samples: ground distance comes from
//! the haversine on a mean-radius sphere, altitude differences fold in
//! when both ends carry altitudes, and the link budget converts RSRP to
//! path loss. Parsing and conversion are stateless per record.

use std::io::{self, BufRead, BufReader, Read};

use serde::Deserialize;
use thiserror::Error;

use crate::models::{require_finite, DistanceM, DomainError, FrequencyGhz, PathLossDb};
use crate::samples::PathLossSample;

/// Mean Earth radius, meters.
pub const MEAN_EARTH_RADIUS_M: f64 = 6_371_008.8;

/// Default minimum usable separation, meters. Matches the CI reference
/// distance; log-distance terms diverge below it.
pub const DEFAULT_MIN_DISTANCE_M: f64 = 1.0;

/// RSRP readings outside this window are suspicious for a drive test but
/// are kept; `build_dataset` counts them in its report.
pub const TYPICAL_RSRP_RANGE_DBM: (f64, f64) = (-160.0, -20.0);

/// Header row of the measurement CSV format.
pub const MEASUREMENT_CSV_HEADER: &str = "lon,lat,alt_m,rsrp_dbm";

const MEASUREMENT_COLUMNS: [&str; 4] = ["lon", "lat", "alt_m", "rsrp_dbm"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing required column `{0}` in header")]
    MissingColumn(&'static str),
    #[error("line 1: bad header `{found}`; expected `{MEASUREMENT_CSV_HEADER}`")]
    BadHeader { found: String },
    #[error("empty input: missing header row")]
    MissingHeader,
    #[error("invalid site config: {0}")]
    Config(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Geographic position in degrees, with an optional altitude in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    lon_deg: f64,
    lat_deg: f64,
    alt_m: Option<f64>,
}

impl GeoPoint {
    pub fn new(lon_deg: f64, lat_deg: f64, alt_m: Option<f64>) -> Result<Self, DomainError> {
        let lon_deg = require_finite("lon", lon_deg)?;
        let lat_deg = require_finite("lat", lat_deg)?;
        if !(-180.0..=180.0).contains(&lon_deg) {
            return Err(DomainError::OutOfRange {
                name: "lon",
                min: -180.0,
                max: 180.0,
                value: lon_deg,
            });
        }
        if !(-90.0..=90.0).contains(&lat_deg) {
            return Err(DomainError::OutOfRange {
                name: "lat",
                min: -90.0,
                max: 90.0,
                value: lat_deg,
            });
        }
        if let Some(alt) = alt_m {
            require_finite("alt_m", alt)?;
        }
        Ok(Self {
            lon_deg,
            lat_deg,
            alt_m,
        })
    }

    pub fn lon_deg(&self) -> f64 {
        self.lon_deg
    }

    pub fn lat_deg(&self) -> f64 {
        self.lat_deg
    }

    pub fn alt_m(&self) -> Option<f64> {
        self.alt_m
    }
}

/// One geotagged receiver reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementRecord {
    position: GeoPoint,
    rsrp_dbm: f64,
}

impl MeasurementRecord {
    pub fn new(position: GeoPoint, rsrp_dbm: f64) -> Result<Self, DomainError> {
        Ok(Self {
            position,
            rsrp_dbm: require_finite("rsrp_dbm", rsrp_dbm)?,
        })
    }

    pub fn position(&self) -> GeoPoint {
        self.position
    }

    pub fn rsrp_dbm(&self) -> f64 {
        self.rsrp_dbm
    }

    pub fn rsrp_in_typical_range(&self) -> bool {
        let (lo, hi) = TYPICAL_RSRP_RANGE_DBM;
        (lo..=hi).contains(&self.rsrp_dbm)
    }
}

/// Transmit-side powers and antenna gains used to convert RSRP to path
/// loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// Total base-station transmit power, dBm. Retained for documentation;
    /// the conversion uses the per-reference-signal power below.
    pub tx_power_dbm: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    /// Per-reference-signal transmit power, dBm; the quantity matched to
    /// RSRP.
    pub ref_signal_power_dbm: f64,
}

impl LinkBudget {
    pub fn new(
        tx_power_dbm: f64,
        tx_gain_dbi: f64,
        rx_gain_dbi: f64,
        ref_signal_power_dbm: f64,
    ) -> Result<Self, DomainError> {
        Ok(Self {
            tx_power_dbm: require_finite("tx_power_dbm", tx_power_dbm)?,
            tx_gain_dbi: require_finite("tx_gain_dbi", tx_gain_dbi)?,
            rx_gain_dbi: require_finite("rx_gain_dbi", rx_gain_dbi)?,
            ref_signal_power_dbm: require_finite("ref_signal_power_dbm", ref_signal_power_dbm)?,
        })
    }
}

/// Site geometry, carrier frequency, and link budget for one measurement
/// site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteConfig {
    pub tx_position: GeoPoint,
    /// Antenna height above the site ground position, meters.
    pub tx_height_m: f64,
    pub frequency: FrequencyGhz,
    pub budget: LinkBudget,
    /// Records closer than this are dropped, meters. At least 1.
    pub min_distance_m: f64,
}

impl SiteConfig {
    pub fn new(
        tx_position: GeoPoint,
        tx_height_m: f64,
        frequency: FrequencyGhz,
        budget: LinkBudget,
        min_distance_m: f64,
    ) -> Result<Self, IngestError> {
        let tx_height_m =
            require_finite("tx_height_m", tx_height_m).map_err(IngestError::Domain)?;
        if tx_height_m < 0.0 {
            return Err(IngestError::Config(format!(
                "tx_height_m must be >= 0, got {tx_height_m}"
            )));
        }
        if !min_distance_m.is_finite() || min_distance_m < DEFAULT_MIN_DISTANCE_M {
            return Err(IngestError::Config(format!(
                "min_distance_m must be >= {DEFAULT_MIN_DISTANCE_M}, got {min_distance_m}"
            )));
        }
        Ok(Self {
            tx_position,
            tx_height_m,
            frequency,
            budget,
            min_distance_m,
        })
    }

    /// Parse a site config from its JSON form (flat keys: `tx_lon`,
    /// `tx_lat`, `tx_alt_m`, `tx_height_m`, `freq_ghz`, `tx_power_dbm`,
    /// `tx_gain_dbi`, `rx_gain_dbi`, `ref_signal_power_dbm`,
    /// `min_distance_m`).
    pub fn from_json_str(json: &str) -> Result<Self, IngestError> {
        let raw: SiteConfigFile =
            serde_json::from_str(json).map_err(|e| IngestError::Config(e.to_string()))?;
        raw.build()
    }

    pub fn from_json_reader<R: Read>(reader: R) -> Result<Self, IngestError> {
        let raw: SiteConfigFile =
            serde_json::from_reader(reader).map_err(|e| IngestError::Config(e.to_string()))?;
        raw.build()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SiteConfigFile {
    tx_lon: f64,
    tx_lat: f64,
    #[serde(default)]
    tx_alt_m: Option<f64>,
    tx_height_m: f64,
    freq_ghz: f64,
    tx_power_dbm: f64,
    tx_gain_dbi: f64,
    rx_gain_dbi: f64,
    ref_signal_power_dbm: f64,
    #[serde(default = "default_min_distance")]
    min_distance_m: f64,
}

fn default_min_distance() -> f64 {
    DEFAULT_MIN_DISTANCE_M
}

impl SiteConfigFile {
    fn build(self) -> Result<SiteConfig, IngestError> {
        let position = GeoPoint::new(self.tx_lon, self.tx_lat, self.tx_alt_m)?;
        let frequency = FrequencyGhz::new(self.freq_ghz)?;
        let budget = LinkBudget::new(
            self.tx_power_dbm,
            self.tx_gain_dbi,
            self.rx_gain_dbi,
            self.ref_signal_power_dbm,
        )?;
        SiteConfig::new(
            position,
            self.tx_height_m,
            frequency,
            budget,
            self.min_distance_m,
        )
    }
}

/// Great-circle distance in meters between two points on the mean-radius
/// sphere. Symmetric and non-negative.
pub fn haversine_distance(a: &GeoPoint, b: &GeoPoint) -> f64 {
    let lat_a = a.lat_deg.to_radians();
    let lat_b = b.lat_deg.to_radians();
    let half_dlat = (lat_b - lat_a) / 2.0;
    let half_dlon = (b.lon_deg - a.lon_deg).to_radians() / 2.0;
    let h = half_dlat.sin().powi(2) + lat_a.cos() * lat_b.cos() * half_dlon.sin().powi(2);
    2.0 * MEAN_EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}

/// Transmitter-receiver separation in meters.
///
/// Ground distance comes from [`haversine_distance`]. When both the record
/// and the site carry altitudes, the vertical offset between the receiver
/// and the antenna (site ground altitude plus `tx_height_m`) folds in for
/// a 3-D separation; otherwise the ground distance stands alone.
pub fn tr_separation(site: &SiteConfig, rec: &MeasurementRecord) -> f64 {
    let ground = haversine_distance(&site.tx_position, &rec.position);
    match (rec.position.alt_m, site.tx_position.alt_m) {
        (Some(rx_alt), Some(tx_ground_alt)) => {
            let dalt = rx_alt - (tx_ground_alt + site.tx_height_m);
            (ground * ground + dalt * dalt).sqrt()
        }
        _ => ground,
    }
}

/// Path loss implied by an RSRP reading under the given link budget:
/// `PL = ref_signal_power + tx_gain + rx_gain - rsrp`.
pub fn rsrp_to_path_loss(budget: &LinkBudget, rsrp_dbm: f64) -> PathLossDb {
    PathLossDb::new(
        budget.ref_signal_power_dbm + budget.tx_gain_dbi + budget.rx_gain_dbi - rsrp_dbm,
    )
}

/// Parse a measurement CSV (`lon,lat,alt_m,rsrp_dbm`; `alt_m` may be
/// empty) into records, in input order.
///
/// Line numbers in errors are 1-based and count the header row.
pub fn load_measurements<R: Read>(reader: R) -> Result<Vec<MeasurementRecord>, IngestError> {
    let mut lines = BufReader::new(reader).lines();
    let header = lines.next().ok_or(IngestError::MissingHeader)??;
    validate_header(&header)?;

    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(parse_record(&line, line_no)?);
    }
    Ok(records)
}

fn validate_header(header: &str) -> Result<(), IngestError> {
    let fields: Vec<&str> = header.split(',').map(str::trim).collect();
    for required in MEASUREMENT_COLUMNS {
        if !fields.contains(&required) {
            return Err(IngestError::MissingColumn(required));
        }
    }
    if fields != MEASUREMENT_COLUMNS {
        return Err(IngestError::BadHeader {
            found: header.trim().to_string(),
        });
    }
    Ok(())
}

fn parse_record(line: &str, line_no: usize) -> Result<MeasurementRecord, IngestError> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != MEASUREMENT_COLUMNS.len() {
        return Err(IngestError::Parse {
            line: line_no,
            message: format!("expected 4 fields, got {}", fields.len()),
        });
    }
    let lon = parse_f64(fields[0], "lon", line_no)?;
    let lat = parse_f64(fields[1], "lat", line_no)?;
    let alt = if fields[2].is_empty() {
        None
    } else {
        Some(parse_f64(fields[2], "alt_m", line_no)?)
    };
    let rsrp = parse_f64(fields[3], "rsrp_dbm", line_no)?;

    let position = GeoPoint::new(lon, lat, alt).map_err(|e| IngestError::Parse {
        line: line_no,
        message: e.to_string(),
    })?;
    MeasurementRecord::new(position, rsrp).map_err(|e| IngestError::Parse {
        line: line_no,
        message: e.to_string(),
    })
}

fn parse_f64(raw: &str, name: &str, line_no: usize) -> Result<f64, IngestError> {
    raw.parse::<f64>().map_err(|_| IngestError::Parse {
        line: line_no,
        message: format!("invalid {name} `{raw}`"),
    })
}

/// Outcome counters for one [`build_dataset`] run. Conservation holds:
/// `samples_out + dropped_below_min_distance == records_in`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DropReport {
    pub records_in: usize,
    pub samples_out: usize,
    pub dropped_below_min_distance: usize,
    /// Records kept despite an RSRP outside [`TYPICAL_RSRP_RANGE_DBM`].
    pub suspect_rsrp: usize,
}

/// Convert records into path-loss samples, dropping those closer than the
/// site's minimum distance. Drops are counted, never thrown.
pub fn build_dataset(
    site: &SiteConfig,
    records: &[MeasurementRecord],
) -> (Vec<PathLossSample>, DropReport) {
    let mut report = DropReport {
        records_in: records.len(),
        ..DropReport::default()
    };
    let mut samples = Vec::with_capacity(records.len());
    for rec in records {
        if !rec.rsrp_in_typical_range() {
            report.suspect_rsrp += 1;
        }
        let separation = tr_separation(site, rec);
        if separation < site.min_distance_m {
            report.dropped_below_min_distance += 1;
            continue;
        }
        samples.push(PathLossSample {
            distance: DistanceM::new(separation).expect("separation >= min_distance >= 1"),
            path_loss: rsrp_to_path_loss(&site.budget, rec.rsrp_dbm),
        });
    }
    report.samples_out = samples.len();
    (samples, report)
}
