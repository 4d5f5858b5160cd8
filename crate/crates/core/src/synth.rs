//! Deterministic synthetic path-loss datasets.
//!
//! Distances lie on a linear or logarithmic grid over `[d_min, d_max]`;
//! shadowing is additive zero-mean Gaussian noise in dB (lognormal in
//! linear power), the usual model for large-scale fading residuals.
//!
//! Randomness is pinned down completely: the generator is ChaCha8 keyed
//! by the spec's seed with one dedicated stream per sample index, and
//! normal deviates come from the Box-Muller transform of two uniforms
//! drawn from that stream. Any sample is therefore addressable by
//! `(seed, index)` alone — generation can be sharded by index — and an
//! identical spec reproduces a byte-identical dataset.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::{predict, DistanceM, FrequencyGhz, ModelParams, PathLossDb};
use crate::samples::PathLossSample;

/// Distance-grid layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    /// Uniform in log-distance, giving equal leverage per decade in
    /// log-distance fits. The usual choice here.
    Log,
}

/// Recipe for one synthetic dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub params: ModelParams,
    #[serde(rename = "freq_ghz")]
    pub frequency: FrequencyGhz,
    pub d_min_m: f64,
    pub d_max_m: f64,
    pub n_points: usize,
    /// Shadowing standard deviation, dB. Zero puts every sample exactly
    /// on the model curve.
    pub sigma_db: f64,
    pub seed: u64,
    pub spacing: Spacing,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid synth spec: {0}")]
pub struct SynthError(String);

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if !(self.d_min_m.is_finite() && self.d_min_m >= 1.0) {
            return Err(SynthError(format!(
                "d_min_m must be >= 1, got {}",
                self.d_min_m
            )));
        }
        if !(self.d_max_m.is_finite() && self.d_max_m > self.d_min_m) {
            return Err(SynthError(format!(
                "d_max_m must exceed d_min_m ({}), got {}",
                self.d_min_m, self.d_max_m
            )));
        }
        if self.n_points == 0 {
            return Err(SynthError("n_points must be >= 1".into()));
        }
        if !(self.sigma_db.is_finite() && self.sigma_db >= 0.0) {
            return Err(SynthError(format!(
                "sigma_db must be >= 0, got {}",
                self.sigma_db
            )));
        }
        Ok(())
    }
}

/// Distances on a grid over `[d_min, d_max]`. A single point sits at
/// `d_min`; otherwise the endpoints are included.
pub fn distance_grid(d_min: f64, d_max: f64, n: usize, spacing: Spacing) -> Vec<f64> {
    if n == 1 {
        return vec![d_min];
    }
    let steps = (n - 1) as f64;
    (0..n)
        .map(|i| {
            let t = i as f64 / steps;
            match spacing {
                Spacing::Linear => d_min + t * (d_max - d_min),
                Spacing::Log => d_min * (d_max / d_min).powf(t),
            }
        })
        .collect()
}

/// Standard normal deviate for `(seed, index)`: Box-Muller over two
/// uniforms from the index's own ChaCha8 stream.
fn standard_normal(seed: u64, index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    // u1 in (0, 1] so the log is finite; u2 in [0, 1).
    let u1 = ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
    let u2 = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Generate `spec.n_points` samples: `PL_i = predict(params, d_i, f) +
/// sigma * z_i` with `z_i` standard normal as documented above.
pub fn generate(spec: &SynthSpec) -> Result<Vec<PathLossSample>, SynthError> {
    spec.validate()?;
    let grid = distance_grid(spec.d_min_m, spec.d_max_m, spec.n_points, spec.spacing);
    Ok(grid
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let distance = DistanceM::new(d).expect("grid distances are >= d_min >= 1");
            let curve = predict(&spec.params, distance, spec.frequency).db();
            let noise = if spec.sigma_db > 0.0 {
                spec.sigma_db * standard_normal(spec.seed, i as u64)
            } else {
                0.0
            };
            PathLossSample {
                distance,
                path_loss: PathLossDb::new(curve + noise),
            }
        })
        .collect())
}
