//! Path-loss model formulas for forest radio propagation.
//!
//! Six models live here: free-space path loss (FSPL), the close-in
//! reference distance model (CI), the alpha-beta-gamma model (ABG), the
//! ITU horizontal forest excess-attenuation model (ITU-H), the FSPL-H
//! combination of the last two, and the BHF model, which replaces the
//! saturating exponential of ITU-H with a tanh vegetation term.
//!
//! Every operation is a pure function of `f64` values: identical inputs
//! produce bit-identical outputs, there is no shared state, and all
//! functions may be called concurrently.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Speed of light in vacuum, meters per second.
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

/// Close-in free-space reference distance of the CI model, meters.
pub const CI_REFERENCE_DISTANCE_M: f64 = 1.0;

/// Distance scale of the BHF vegetation saturation term, meters.
///
/// This is part of the model form, not a fittable parameter.
pub const BHF_TANH_SCALE_M: f64 = 20.0;

/// A numeric quantity violated its domain constraints.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("{name} must be finite, got {value}")]
    NotFinite { name: &'static str, value: f64 },
    #[error("{name} must be > 0, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("{name} must be within [{min}, {max}], got {value}")]
    OutOfRange {
        name: &'static str,
        min: f64,
        max: f64,
        value: f64,
    },
}

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<f64, DomainError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(DomainError::NotFinite { name, value })
    }
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64, DomainError> {
    let value = require_finite(name, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(DomainError::NotPositive { name, value })
    }
}

/// Carrier frequency in gigahertz. Strictly positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64")]
pub struct FrequencyGhz(f64);

impl FrequencyGhz {
    pub fn new(ghz: f64) -> Result<Self, DomainError> {
        Ok(Self(require_positive("frequency in GHz", ghz)?))
    }

    pub fn ghz(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for FrequencyGhz {
    type Error = DomainError;

    fn try_from(ghz: f64) -> Result<Self, DomainError> {
        Self::new(ghz)
    }
}

/// Transmitter-receiver separation in meters. Strictly positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64")]
pub struct DistanceM(f64);

impl DistanceM {
    pub fn new(meters: f64) -> Result<Self, DomainError> {
        Ok(Self(require_positive("distance in meters", meters)?))
    }

    pub fn meters(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for DistanceM {
    type Error = DomainError;

    fn try_from(meters: f64) -> Result<Self, DomainError> {
        Self::new(meters)
    }
}

/// Path loss in decibels.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct PathLossDb(f64);

impl PathLossDb {
    pub fn new(db: f64) -> Self {
        Self(db)
    }

    pub fn db(self) -> f64 {
        self.0
    }
}

/// CI model parameter: the path loss exponent `n`.
///
/// The reference distance is fixed at [`CI_REFERENCE_DISTANCE_M`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CiParams {
    pub n: f64,
}

impl CiParams {
    pub fn new(n: f64) -> Result<Self, DomainError> {
        Ok(Self {
            n: require_finite("path loss exponent n", n)?,
        })
    }
}

/// ABG model parameters: distance coefficient, offset in dB, and frequency
/// coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbgParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl AbgParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self, DomainError> {
        Ok(Self {
            alpha: require_finite("alpha", alpha)?,
            beta: require_finite("beta", beta)?,
            gamma: require_finite("gamma", gamma)?,
        })
    }
}

/// ITU horizontal forest parameters: maximum attenuation `A_m` in dB and
/// specific attenuation `mu` in dB per meter. Both strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ItuHParamsRaw")]
pub struct ItuHParams {
    a_m: f64,
    mu: f64,
}

impl ItuHParams {
    pub fn new(a_m: f64, mu: f64) -> Result<Self, DomainError> {
        Ok(Self {
            a_m: require_positive("maximum attenuation A_m", a_m)?,
            mu: require_positive("specific attenuation mu", mu)?,
        })
    }

    pub fn a_m(self) -> f64 {
        self.a_m
    }

    pub fn mu(self) -> f64 {
        self.mu
    }
}

#[derive(Deserialize)]
struct ItuHParamsRaw {
    a_m: f64,
    mu: f64,
}

impl TryFrom<ItuHParamsRaw> for ItuHParams {
    type Error = DomainError;

    fn try_from(raw: ItuHParamsRaw) -> Result<Self, DomainError> {
        Self::new(raw.a_m, raw.mu)
    }
}

/// BHF model parameters: log-distance coefficient, offset in dB, and the
/// vegetation coefficient scaling the tanh saturation term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BhfParams {
    pub alpha: f64,
    pub beta: f64,
    pub zeta: f64,
}

impl BhfParams {
    pub fn new(alpha: f64, beta: f64, zeta: f64) -> Result<Self, DomainError> {
        Ok(Self {
            alpha: require_finite("alpha", alpha)?,
            beta: require_finite("beta", beta)?,
            zeta: require_finite("zeta", zeta)?,
        })
    }
}

/// Parameter set for one model, tagged by model name.
///
/// Serializes as a JSON object with a `"model"` tag, e.g.
/// `{"model":"bhf","alpha":0.8,"beta":48.3,"zeta":64.2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelParams {
    Fspl,
    Ci(CiParams),
    Abg(AbgParams),
    ItuH(ItuHParams),
    FsplH(ItuHParams),
    Bhf(BhfParams),
}

impl ModelParams {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Fspl => ModelKind::Fspl,
            ModelParams::Ci(_) => ModelKind::Ci,
            ModelParams::Abg(_) => ModelKind::Abg,
            ModelParams::ItuH(_) => ModelKind::ItuH,
            ModelParams::FsplH(_) => ModelKind::FsplH,
            ModelParams::Bhf(_) => ModelKind::Bhf,
        }
    }
}

/// Model identifier, used for CLI flags, report entries, and dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Fspl,
    Ci,
    Abg,
    ItuH,
    FsplH,
    Bhf,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Fspl => "fspl",
            ModelKind::Ci => "ci",
            ModelKind::Abg => "abg",
            ModelKind::ItuH => "ituh",
            ModelKind::FsplH => "fsplh",
            ModelKind::Bhf => "bhf",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown model `{0}`; expected one of fspl, ci, abg, ituh, fsplh, bhf")]
pub struct UnknownModelError(pub String);

impl FromStr for ModelKind {
    type Err = UnknownModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fspl" => Ok(ModelKind::Fspl),
            "ci" => Ok(ModelKind::Ci),
            "abg" => Ok(ModelKind::Abg),
            "ituh" => Ok(ModelKind::ItuH),
            "fsplh" => Ok(ModelKind::FsplH),
            "bhf" => Ok(ModelKind::Bhf),
            other => Err(UnknownModelError(other.to_string())),
        }
    }
}

/// Free-space path loss: `20·log10(4π·f·d·10⁹ / c)` with `f` in GHz and
/// `d` in meters. Strictly increasing in both arguments.
pub fn fspl(d: DistanceM, f: FrequencyGhz) -> PathLossDb {
    PathLossDb(20.0 * (4.0 * PI * f.ghz() * 1e9 * d.meters() / SPEED_OF_LIGHT_M_PER_S).log10())
}

/// Close-in reference distance model:
/// `10·n·log10(d/d0) + 20·log10(4π·10⁹/c) + 20·log10(f)` with `d0` = 1 m.
///
/// At `d = d0` this equals `fspl(d0, f)` for every `n`.
pub fn ci(d: DistanceM, f: FrequencyGhz, p: CiParams) -> PathLossDb {
    let anchor_db =
        20.0 * (4.0 * PI * 1e9 / SPEED_OF_LIGHT_M_PER_S).log10() + 20.0 * f.ghz().log10();
    PathLossDb(10.0 * p.n * (d.meters() / CI_REFERENCE_DISTANCE_M).log10() + anchor_db)
}

/// Alpha-beta-gamma model: `10·α·log10(d) + β + 10·γ·log10(f)`.
pub fn abg(d: DistanceM, f: FrequencyGhz, p: AbgParams) -> PathLossDb {
    PathLossDb(10.0 * p.alpha * d.meters().log10() + p.beta + 10.0 * p.gamma * f.ghz().log10())
}

/// ITU horizontal forest excess attenuation: `A_m·(1 − e^(−d·μ/A_m))`.
///
/// The value lies in `(0, A_m)` for every `d > 0` and increases
/// monotonically toward the `A_m` asymptote.
pub fn itu_h(d: DistanceM, p: ItuHParams) -> PathLossDb {
    PathLossDb(p.a_m * (1.0 - (-d.meters() * p.mu / p.a_m).exp()))
}

/// FSPL plus the ITU horizontal forest excess term; exactly the sum of
/// [`fspl`] and [`itu_h`].
pub fn fspl_h(d: DistanceM, f: FrequencyGhz, p: ItuHParams) -> PathLossDb {
    PathLossDb(fspl(d, f).db() + itu_h(d, p).db())
}

/// BHF model: `10·α·log10(d) + β + ζ·tanh(d/20) + 20·log10(f)` with `d`
/// in meters and `f` in GHz.
pub fn bhf(d: DistanceM, f: FrequencyGhz, p: BhfParams) -> PathLossDb {
    PathLossDb(
        10.0 * p.alpha * d.meters().log10()
            + p.beta
            + p.zeta * (d.meters() / BHF_TANH_SCALE_M).tanh()
            + 20.0 * f.ghz().log10(),
    )
}

/// Evaluate whichever model `params` selects; bit-identical to calling the
/// model function directly.
pub fn predict(params: &ModelParams, d: DistanceM, f: FrequencyGhz) -> PathLossDb {
    match params {
        ModelParams::Fspl => fspl(d, f),
        ModelParams::Ci(p) => ci(d, f, *p),
        ModelParams::Abg(p) => abg(d, f, *p),
        ModelParams::ItuH(p) => itu_h(d, *p),
        ModelParams::FsplH(p) => fspl_h(d, f, *p),
        ModelParams::Bhf(p) => bhf(d, f, *p),
    }
}
