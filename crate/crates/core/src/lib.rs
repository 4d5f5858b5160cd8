//! Forest radio propagation path-loss toolkit.
//!
//! Everything needed to go from a geotagged RSRP drive-test log to a
//! ranked comparison of path-loss models:
//!
//! - [`models`] — the model formulas (FSPL, CI, ABG, ITU-H, FSPL-H, BHF)
//!   and their parameter types;
//! - [`ingest`] — log parsing, site geometry, and the RSRP-to-path-loss
//!   link budget;
//! - [`samples`] — the `(distance, path loss)` sample type and its CSV
//!   form, shared by every producer and consumer;
//! - [`fit`] — least-squares estimation per model plus RMSE diagnostics;
//! - [`synth`] — deterministic seeded synthetic datasets for testing and
//!   demos.
//!
//! All computations are pure and deterministic: the same inputs always
//! produce the same outputs, bit for bit.

pub mod fit;
pub mod ingest;
pub mod models;
pub mod samples;
pub mod synth;

pub use fit::{FitError, FitOutcome, FitResult, SimplexConfig};
pub use ingest::{DropReport, GeoPoint, IngestError, LinkBudget, MeasurementRecord, SiteConfig};
pub use models::{
    AbgParams, BhfParams, CiParams, DistanceM, DomainError, FrequencyGhz, ItuHParams, ModelKind,
    ModelParams, PathLossDb,
};
pub use samples::PathLossSample;
pub use synth::{Spacing, SynthSpec};
