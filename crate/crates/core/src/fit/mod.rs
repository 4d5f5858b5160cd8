//! Least-squares parameter estimation and RMSE evaluation for the
//! path-loss models.
//!
//! CI, ABG, and BHF are linear in their free parameters once the fixed
//! frequency terms move to the left-hand side: CI reduces to a
//! single-regressor closed form anchored at the 1 m free-space value, and
//! ABG/BHF solve by QR decomposition with a reported condition number.
//! FSPL-H is genuinely nonlinear and is minimized by a multistart
//! Nelder-Mead simplex over log-transformed parameters, which keeps both
//! parameters positive without a constrained solver.
//!
//! Every fit is a pure computation over an immutable sample slice;
//! identical inputs produce identical results regardless of scheduling.

mod linear;
mod simplex;

use thiserror::Error;

use crate::models::{
    fspl, itu_h, predict, AbgParams, BhfParams, CiParams, DistanceM, FrequencyGhz, ItuHParams,
    ModelKind, ModelParams, BHF_TANH_SCALE_M, CI_REFERENCE_DISTANCE_M,
};
use crate::samples::PathLossSample;

/// Fixed frequency exponent for single-band ABG fits.
pub const DEFAULT_ABG_GAMMA: f64 = 2.0;

/// Models handled by [`fit_all`], in reporting order.
pub const FIT_ORDER: [ModelKind; 4] = [
    ModelKind::Ci,
    ModelKind::Abg,
    ModelKind::FsplH,
    ModelKind::Bhf,
];

/// Log-space search box for the FSPL-H optimizer; keeps `exp` of either
/// coordinate positive, normal, and finite.
const LOG_PARAM_BOUND: f64 = 50.0;

/// Number of free parameters each fit estimates. ABG counts two because
/// gamma stays fixed for single-frequency data.
pub fn fitted_param_count(kind: ModelKind) -> usize {
    match kind {
        ModelKind::Fspl => 0,
        ModelKind::Ci => 1,
        ModelKind::Abg => 2,
        ModelKind::ItuH => 2,
        ModelKind::FsplH => 2,
        ModelKind::Bhf => 3,
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("cannot fit an empty dataset")]
    EmptyDataset,
    #[error("degenerate design: {0}")]
    DegenerateDesign(String),
    #[error("design matrix is numerically rank-deficient (condition number {condition_number:.3e})")]
    RankDeficient { condition_number: f64 },
    #[error("invalid optimizer config: {0}")]
    InvalidConfig(String),
}

/// Settings for the FSPL-H simplex search.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexConfig {
    /// Objective-evaluation budget per start point.
    pub max_evals: usize,
    /// Convergence tolerance on the objective spread across the simplex.
    pub tol: f64,
    /// Deterministic multistart grid of `(A_m, mu)` starting points.
    pub multistart: Vec<(f64, f64)>,
}

impl Default for SimplexConfig {
    fn default() -> Self {
        let mut multistart = Vec::new();
        for a_m in [5.0, 20.0, 40.0, 80.0] {
            for mu in [0.05, 0.5, 1.5, 5.0] {
                multistart.push((a_m, mu));
            }
        }
        Self {
            max_evals: 10_000,
            tol: 1e-10,
            multistart,
        }
    }
}

impl SimplexConfig {
    fn validate(&self) -> Result<(), FitError> {
        if self.max_evals == 0 {
            return Err(FitError::InvalidConfig("max_evals must be > 0".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(FitError::InvalidConfig(format!(
                "tol must be positive and finite, got {}",
                self.tol
            )));
        }
        if self.multistart.is_empty() {
            return Err(FitError::InvalidConfig("multistart grid is empty".into()));
        }
        for &(a_m, mu) in &self.multistart {
            if !(a_m > 0.0 && a_m.is_finite() && mu > 0.0 && mu.is_finite()) {
                return Err(FitError::InvalidConfig(format!(
                    "multistart points must be positive and finite, got ({a_m}, {mu})"
                )));
            }
        }
        Ok(())
    }
}

/// Fitted parameters plus goodness-of-fit diagnostics for one model on one
/// dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: ModelParams,
    pub rmse_db: f64,
    pub n_points: usize,
    /// Free parameters estimated by this fit.
    pub n_params: usize,
    /// Condition number of the design matrix for the multi-column linear
    /// fits (ABG, BHF); `None` otherwise.
    pub condition_number: Option<f64>,
    /// Whether the nonlinear search converged (FSPL-H only).
    pub converged: Option<bool>,
    /// Simplex iterations of the winning start (FSPL-H only).
    pub iterations: Option<usize>,
}

/// Result of one model's fit inside a [`fit_all`] batch. Per-model
/// failures are captured here instead of aborting the batch.
#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub model: ModelKind,
    pub n_params: usize,
    pub result: Result<FitResult, FitError>,
}

/// Root-mean-square error of `params` against the samples, in dB.
pub fn rmse(
    samples: &[PathLossSample],
    params: &ModelParams,
    f: FrequencyGhz,
) -> Result<f64, FitError> {
    if samples.is_empty() {
        return Err(FitError::EmptyDataset);
    }
    let sum_sq: f64 = samples
        .iter()
        .map(|s| {
            let r = s.path_loss.db() - predict(params, s.distance, f).db();
            r * r
        })
        .sum();
    Ok((sum_sq / samples.len() as f64).sqrt())
}

/// Fit the CI path loss exponent by closed-form least squares:
/// `n = sum((PL_i - fspl(1, f)) * 10*log10(d_i)) / sum((10*log10(d_i))^2)`.
pub fn fit_ci(samples: &[PathLossSample], f: FrequencyGhz) -> Result<FitResult, FitError> {
    if samples.is_empty() {
        return Err(FitError::EmptyDataset);
    }
    let anchor = fspl(
        DistanceM::new(CI_REFERENCE_DISTANCE_M).expect("reference distance is valid"),
        f,
    )
    .db();
    let mut num = 0.0;
    let mut den = 0.0;
    for s in samples {
        let regressor = 10.0 * s.distance.meters().log10();
        num += (s.path_loss.db() - anchor) * regressor;
        den += regressor * regressor;
    }
    if den <= 0.0 {
        return Err(FitError::DegenerateDesign(
            "every distance equals the 1 m reference".into(),
        ));
    }
    let n = num / den;
    let params = ModelParams::Ci(
        CiParams::new(n).map_err(|e| FitError::DegenerateDesign(e.to_string()))?,
    );
    Ok(FitResult {
        rmse_db: rmse(samples, &params, f)?,
        params,
        n_points: samples.len(),
        n_params: fitted_param_count(ModelKind::Ci),
        condition_number: None,
        converged: None,
        iterations: None,
    })
}

/// Fit ABG with a fixed frequency exponent: ordinary least squares of
/// `PL_i - 10*gamma*log10(f)` on `10*log10(d_i)` with an intercept.
pub fn fit_abg(
    samples: &[PathLossSample],
    f: FrequencyGhz,
    gamma_fixed: f64,
) -> Result<FitResult, FitError> {
    if samples.is_empty() {
        return Err(FitError::EmptyDataset);
    }
    let first = samples[0].distance.meters();
    if !samples.iter().any(|s| s.distance.meters() != first) {
        return Err(FitError::DegenerateDesign(
            "need at least 2 distinct distances".into(),
        ));
    }
    let log_dist: Vec<f64> = samples
        .iter()
        .map(|s| 10.0 * s.distance.meters().log10())
        .collect();
    let ones = vec![1.0; samples.len()];
    let freq_term = 10.0 * gamma_fixed * f.ghz().log10();
    let y: Vec<f64> = samples
        .iter()
        .map(|s| s.path_loss.db() - freq_term)
        .collect();

    let sol = linear::solve(&[&log_dist, &ones], &y)?;
    let params = ModelParams::Abg(
        AbgParams::new(sol.coeffs[0], sol.coeffs[1], gamma_fixed)
            .map_err(|e| FitError::DegenerateDesign(e.to_string()))?,
    );
    Ok(FitResult {
        rmse_db: rmse(samples, &params, f)?,
        params,
        n_points: samples.len(),
        n_params: fitted_param_count(ModelKind::Abg),
        condition_number: Some(sol.condition_number),
        converged: None,
        iterations: None,
    })
}

/// Fit BHF by linear least squares on the basis
/// `[10*log10(d), 1, tanh(d/20)]` against `PL_i - 20*log10(f)`.
///
/// The tanh column duplicates the intercept when every distance sits far
/// past the tanh knee; the design's condition number is always computed,
/// and a numerically rank-deficient design is an error that carries it.
pub fn fit_bhf(samples: &[PathLossSample], f: FrequencyGhz) -> Result<FitResult, FitError> {
    if samples.is_empty() {
        return Err(FitError::EmptyDataset);
    }
    let log_dist: Vec<f64> = samples
        .iter()
        .map(|s| 10.0 * s.distance.meters().log10())
        .collect();
    let ones = vec![1.0; samples.len()];
    let veg: Vec<f64> = samples
        .iter()
        .map(|s| (s.distance.meters() / BHF_TANH_SCALE_M).tanh())
        .collect();
    let freq_term = 20.0 * f.ghz().log10();
    let y: Vec<f64> = samples
        .iter()
        .map(|s| s.path_loss.db() - freq_term)
        .collect();

    let sol = linear::solve(&[&log_dist, &ones, &veg], &y)?;
    let params = ModelParams::Bhf(
        BhfParams::new(sol.coeffs[0], sol.coeffs[1], sol.coeffs[2])
            .map_err(|e| FitError::DegenerateDesign(e.to_string()))?,
    );
    Ok(FitResult {
        rmse_db: rmse(samples, &params, f)?,
        params,
        n_points: samples.len(),
        n_params: fitted_param_count(ModelKind::Bhf),
        condition_number: Some(sol.condition_number),
        converged: None,
        iterations: None,
    })
}

fn excess_objective(distances: &[DistanceM], y: &[f64], z: &[f64]) -> f64 {
    if z[0].abs() > LOG_PARAM_BOUND || z[1].abs() > LOG_PARAM_BOUND {
        return f64::INFINITY;
    }
    let params = match ItuHParams::new(z[0].exp(), z[1].exp()) {
        Ok(p) => p,
        Err(_) => return f64::INFINITY,
    };
    distances
        .iter()
        .zip(y)
        .map(|(d, yi)| {
            let r = yi - itu_h(*d, params).db();
            r * r
        })
        .sum()
}

/// Fit FSPL-H by minimizing the squared excess-loss residual
/// `sum((PL_i - fspl(d_i, f) - A_m*(1 - e^(-d_i*mu/A_m)))^2)` over
/// `A_m > 0, mu > 0`.
///
/// The search runs in log-parameter space from every start in the
/// multistart grid; the lowest final objective wins, which also makes the
/// result no worse than any start point. Non-convergence is reported via
/// `converged = false`, not an error.
pub fn fit_fsplh(
    samples: &[PathLossSample],
    f: FrequencyGhz,
    cfg: &SimplexConfig,
) -> Result<FitResult, FitError> {
    if samples.is_empty() {
        return Err(FitError::EmptyDataset);
    }
    if samples.len() < 2 {
        return Err(FitError::DegenerateDesign(
            "need at least 2 samples for a 2-parameter fit".into(),
        ));
    }
    cfg.validate()?;

    let distances: Vec<DistanceM> = samples.iter().map(|s| s.distance).collect();
    let y: Vec<f64> = samples
        .iter()
        .map(|s| s.path_loss.db() - fspl(s.distance, f).db())
        .collect();

    let mut best: Option<simplex::SimplexOutcome> = None;
    for &(a_m0, mu0) in &cfg.multistart {
        let start = [a_m0.ln(), mu0.ln()];
        let out = simplex::minimize(
            |z| excess_objective(&distances, &y, z),
            &start,
            0.5,
            cfg.tol,
            cfg.max_evals,
        );
        let better = match &best {
            None => true,
            Some(b) => out.objective < b.objective,
        };
        if better {
            best = Some(out);
        }
    }
    let best = best.expect("multistart grid is nonempty");

    let params = ModelParams::FsplH(
        ItuHParams::new(best.point[0].exp(), best.point[1].exp())
            .expect("bounded search keeps parameters positive"),
    );
    Ok(FitResult {
        rmse_db: rmse(samples, &params, f)?,
        params,
        n_points: samples.len(),
        n_params: fitted_param_count(ModelKind::FsplH),
        condition_number: None,
        converged: Some(best.converged),
        iterations: Some(best.iterations),
    })
}

/// Run all four fits (CI, ABG with gamma fixed at 2, FSPL-H, BHF) and
/// collect per-model outcomes without aborting on individual failures.
pub fn fit_all(
    samples: &[PathLossSample],
    f: FrequencyGhz,
    cfg: &SimplexConfig,
) -> Vec<FitOutcome> {
    FIT_ORDER
        .iter()
        .map(|&model| {
            let result = match model {
                ModelKind::Ci => fit_ci(samples, f),
                ModelKind::Abg => fit_abg(samples, f, DEFAULT_ABG_GAMMA),
                ModelKind::FsplH => fit_fsplh(samples, f, cfg),
                ModelKind::Bhf => fit_bhf(samples, f),
                _ => unreachable!("FIT_ORDER only lists fittable models"),
            };
            FitOutcome {
                model,
                n_params: fitted_param_count(model),
                result,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::PathLossDb;
    use crate::synth::{generate, Spacing, SynthSpec};

    fn freq() -> FrequencyGhz {
        FrequencyGhz::new(0.605).unwrap()
    }

    fn spec(params: ModelParams, sigma_db: f64, n_points: usize, seed: u64) -> SynthSpec {
        SynthSpec {
            params,
            frequency: freq(),
            d_min_m: 5.0,
            d_max_m: 500.0,
            n_points,
            sigma_db,
            seed,
            spacing: Spacing::Log,
        }
    }

    fn ci_params(n: f64) -> ModelParams {
        ModelParams::Ci(CiParams::new(n).unwrap())
    }

    fn abg_params(alpha: f64, beta: f64) -> ModelParams {
        ModelParams::Abg(AbgParams::new(alpha, beta, 2.0).unwrap())
    }

    fn bhf_params(alpha: f64, beta: f64, zeta: f64) -> ModelParams {
        ModelParams::Bhf(BhfParams::new(alpha, beta, zeta).unwrap())
    }

    fn fsplh_params(a_m: f64, mu: f64) -> ModelParams {
        ModelParams::FsplH(ItuHParams::new(a_m, mu).unwrap())
    }

    fn sample_at(d: f64, pl: f64) -> PathLossSample {
        PathLossSample {
            distance: DistanceM::new(d).unwrap(),
            path_loss: PathLossDb::new(pl),
        }
    }

    #[test]
    fn rmse_is_zero_on_exact_data() {
        let params = bhf_params(0.8, 48.3, 64.2);
        let samples = generate(&spec(params, 0.0, 50, 1)).unwrap();
        assert!(rmse(&samples, &params, freq()).unwrap() < 1e-12);
    }

    #[test]
    fn rmse_of_constant_offset_is_that_offset() {
        let params = ci_params(3.8);
        let samples: Vec<PathLossSample> = generate(&spec(params, 0.0, 50, 1))
            .unwrap()
            .into_iter()
            .map(|s| sample_at(s.distance.meters(), s.path_loss.db() + 3.0))
            .collect();
        let e = rmse(&samples, &params, freq()).unwrap();
        assert!((e - 3.0).abs() < 1e-9, "got {e}");
    }

    #[test]
    fn rmse_of_symmetric_residuals() {
        let params = ModelParams::Fspl;
        let d1 = DistanceM::new(10.0).unwrap();
        let d2 = DistanceM::new(100.0).unwrap();
        let samples = vec![
            sample_at(10.0, predict(&params, d1, freq()).db() + 3.0),
            sample_at(100.0, predict(&params, d2, freq()).db() - 3.0),
        ];
        let e = rmse(&samples, &params, freq()).unwrap();
        assert!((e - 3.0).abs() < 1e-12, "got {e}");
    }

    #[test]
    fn rmse_rejects_empty_dataset() {
        assert!(matches!(
            rmse(&[], &ModelParams::Fspl, freq()),
            Err(FitError::EmptyDataset)
        ));
    }

    #[test]
    fn ci_recovers_noiseless_exponent() {
        let samples = generate(&spec(ci_params(3.8), 0.0, 200, 2)).unwrap();
        let fit = fit_ci(&samples, freq()).unwrap();
        match fit.params {
            ModelParams::Ci(p) => assert!((p.n - 3.8).abs() < 1e-9, "n = {}", p.n),
            other => panic!("unexpected params {other:?}"),
        }
        assert!(fit.rmse_db < 1e-8);
        assert_eq!(fit.n_params, 1);
    }

    #[test]
    fn ci_on_free_space_data_finds_n_two() {
        let samples = generate(&spec(ModelParams::Fspl, 0.0, 200, 3)).unwrap();
        let fit = fit_ci(&samples, freq()).unwrap();
        match fit.params {
            ModelParams::Ci(p) => assert!((p.n - 2.0).abs() < 1e-9, "n = {}", p.n),
            other => panic!("unexpected params {other:?}"),
        }
    }

    #[test]
    fn ci_noisy_recovery_within_tolerance() {
        let samples = generate(&spec(ci_params(4.0), 8.0, 2000, 42)).unwrap();
        let fit = fit_ci(&samples, freq()).unwrap();
        match fit.params {
            ModelParams::Ci(p) => assert!((p.n - 4.0).abs() < 0.15, "n = {}", p.n),
            other => panic!("unexpected params {other:?}"),
        }
    }

    #[test]
    fn ci_rejects_all_samples_at_reference_distance() {
        let samples = vec![sample_at(1.0, 30.0), sample_at(1.0, 31.0)];
        assert!(matches!(
            fit_ci(&samples, freq()),
            Err(FitError::DegenerateDesign(_))
        ));
        assert!(matches!(fit_ci(&[], freq()), Err(FitError::EmptyDataset)));
    }

    #[test]
    fn abg_recovers_noiseless_parameters() {
        let samples = generate(&spec(abg_params(2.9, 31.8), 0.0, 200, 4)).unwrap();
        let fit = fit_abg(&samples, freq(), 2.0).unwrap();
        match fit.params {
            ModelParams::Abg(p) => {
                assert!((p.alpha - 2.9).abs() < 1e-9, "alpha = {}", p.alpha);
                assert!((p.beta - 31.8).abs() < 1e-9, "beta = {}", p.beta);
                assert_eq!(p.gamma, 2.0);
            }
            other => panic!("unexpected params {other:?}"),
        }
        assert!(fit.rmse_db < 1e-8);
        assert!(fit.condition_number.unwrap() >= 1.0);
    }

    #[test]
    fn abg_two_points_define_the_line() {
        let p = abg_params(2.2, 40.0);
        let d1 = DistanceM::new(10.0).unwrap();
        let d2 = DistanceM::new(200.0).unwrap();
        let samples = vec![
            sample_at(10.0, predict(&p, d1, freq()).db()),
            sample_at(200.0, predict(&p, d2, freq()).db()),
        ];
        let fit = fit_abg(&samples, freq(), 2.0).unwrap();
        assert!(fit.rmse_db < 1e-9, "rmse = {}", fit.rmse_db);
    }

    #[test]
    fn abg_noisy_recovery_within_tolerance() {
        let samples = generate(&spec(abg_params(2.9, 31.8), 8.0, 2000, 43)).unwrap();
        let fit = fit_abg(&samples, freq(), 2.0).unwrap();
        match fit.params {
            ModelParams::Abg(p) => {
                assert!((p.alpha - 2.9).abs() < 0.2, "alpha = {}", p.alpha);
                assert!((p.beta - 31.8).abs() < 1.5, "beta = {}", p.beta);
            }
            other => panic!("unexpected params {other:?}"),
        }
    }

    #[test]
    fn abg_rejects_equal_distances() {
        let samples = vec![sample_at(50.0, 90.0), sample_at(50.0, 91.0)];
        assert!(matches!(
            fit_abg(&samples, freq(), 2.0),
            Err(FitError::DegenerateDesign(_))
        ));
    }

    #[test]
    fn bhf_recovers_noiseless_parameters() {
        for (alpha, beta, zeta) in [(0.8, 48.3, 64.2), (1.6, -1305.2, 1407.0)] {
            let samples = generate(&spec(bhf_params(alpha, beta, zeta), 0.0, 200, 5)).unwrap();
            let fit = fit_bhf(&samples, freq()).unwrap();
            match fit.params {
                ModelParams::Bhf(p) => {
                    assert!((p.alpha - alpha).abs() < 1e-6, "alpha = {}", p.alpha);
                    assert!((p.beta - beta).abs() < 1e-6, "beta = {}", p.beta);
                    assert!((p.zeta - zeta).abs() < 1e-6, "zeta = {}", p.zeta);
                }
                other => panic!("unexpected params {other:?}"),
            }
            assert!(fit.rmse_db < 1e-8, "rmse = {}", fit.rmse_db);
            assert_eq!(fit.n_params, 3);
        }
    }

    #[test]
    fn bhf_far_samples_inflate_condition_number() {
        let params = bhf_params(0.8, 48.3, 64.2);
        let wide = generate(&spec(params, 0.0, 100, 6)).unwrap();
        let mut far_spec = spec(params, 0.0, 100, 6);
        far_spec.d_min_m = 200.0;
        far_spec.d_max_m = 500.0;
        let far = generate(&far_spec).unwrap();

        let kappa_wide = fit_bhf(&wide, freq()).unwrap().condition_number.unwrap();
        let kappa_far = fit_bhf(&far, freq()).unwrap().condition_number.unwrap();
        assert!(
            kappa_far >= 10.0 * kappa_wide,
            "kappa_far = {kappa_far:.3e}, kappa_wide = {kappa_wide:.3e}"
        );
        assert!(kappa_far > 1e6, "collinearity not flagged: {kappa_far:.3e}");
    }

    #[test]
    fn bhf_on_zero_zeta_data_matches_abg_fit() {
        // ABG data with gamma = 2 is exactly BHF data with zeta = 0.
        let samples = generate(&spec(abg_params(2.2, 40.0), 0.0, 200, 7)).unwrap();
        let bhf_fit = fit_bhf(&samples, freq()).unwrap();
        let abg_fit = fit_abg(&samples, freq(), 2.0).unwrap();
        let (b_alpha, b_beta, b_zeta) = match bhf_fit.params {
            ModelParams::Bhf(p) => (p.alpha, p.beta, p.zeta),
            other => panic!("unexpected params {other:?}"),
        };
        let (a_alpha, a_beta) = match abg_fit.params {
            ModelParams::Abg(p) => (p.alpha, p.beta),
            other => panic!("unexpected params {other:?}"),
        };
        assert!(b_zeta.abs() < 1e-7, "zeta = {b_zeta}");
        assert!((b_alpha - a_alpha).abs() < 1e-7);
        assert!((b_beta - a_beta).abs() < 1e-7);
    }

    #[test]
    fn fsplh_recovers_noiseless_parameters() {
        let cfg = SimplexConfig::default();
        for (a_m, mu, tol) in [(40.0, 1.2, 0.01), (43.8, 4.6, 0.05)] {
            let samples = generate(&spec(fsplh_params(a_m, mu), 0.0, 200, 8)).unwrap();
            let fit = fit_fsplh(&samples, freq(), &cfg).unwrap();
            match fit.params {
                ModelParams::FsplH(p) => {
                    assert!((p.a_m() - a_m).abs() < tol, "a_m = {}", p.a_m());
                    assert!((p.mu() - mu).abs() < tol, "mu = {}", p.mu());
                }
                other => panic!("unexpected params {other:?}"),
            }
            assert_eq!(fit.converged, Some(true));
            assert!(fit.iterations.unwrap() > 0);
        }
    }

    #[test]
    fn fsplh_final_objective_beats_every_start() {
        let cfg = SimplexConfig::default();
        let samples = generate(&spec(fsplh_params(40.0, 1.2), 6.0, 200, 9)).unwrap();
        let fit = fit_fsplh(&samples, freq(), &cfg).unwrap();
        let fitted = match fit.params {
            ModelParams::FsplH(p) => p,
            other => panic!("unexpected params {other:?}"),
        };
        let sse = |p: ItuHParams| -> f64 {
            samples
                .iter()
                .map(|s| {
                    let excess = s.path_loss.db() - fspl(s.distance, freq()).db();
                    let r = excess - itu_h(s.distance, p).db();
                    r * r
                })
                .sum()
        };
        let final_sse = sse(fitted);
        for &(a_m, mu) in &cfg.multistart {
            let start_sse = sse(ItuHParams::new(a_m, mu).unwrap());
            assert!(
                final_sse <= start_sse + 1e-9,
                "descent violated: {final_sse} > {start_sse} at start ({a_m}, {mu})"
            );
        }
    }

    #[test]
    fn fsplh_on_pure_fspl_data_finds_no_excess() {
        let cfg = SimplexConfig::default();
        let samples = generate(&spec(ModelParams::Fspl, 0.0, 200, 10)).unwrap();
        let fit = fit_fsplh(&samples, freq(), &cfg).unwrap();
        let p = match fit.params {
            ModelParams::FsplH(p) => p,
            other => panic!("unexpected params {other:?}"),
        };
        let max_excess = samples
            .iter()
            .map(|s| itu_h(s.distance, p).db())
            .fold(0.0f64, f64::max);
        assert!(max_excess < 1e-6, "excess = {max_excess}");
        assert!(fit.rmse_db < 1e-8, "rmse = {}", fit.rmse_db);
    }

    #[test]
    fn fsplh_rejects_insufficient_samples_and_bad_config() {
        let cfg = SimplexConfig::default();
        assert!(matches!(
            fit_fsplh(&[], freq(), &cfg),
            Err(FitError::EmptyDataset)
        ));
        let one = vec![sample_at(10.0, 70.0)];
        assert!(matches!(
            fit_fsplh(&one, freq(), &cfg),
            Err(FitError::DegenerateDesign(_))
        ));
        let samples = vec![sample_at(10.0, 70.0), sample_at(100.0, 100.0)];
        let bad = SimplexConfig {
            tol: 0.0,
            ..SimplexConfig::default()
        };
        assert!(matches!(
            fit_fsplh(&samples, freq(), &bad),
            Err(FitError::InvalidConfig(_))
        ));
        let empty_grid = SimplexConfig {
            multistart: vec![],
            ..SimplexConfig::default()
        };
        assert!(matches!(
            fit_fsplh(&samples, freq(), &empty_grid),
            Err(FitError::InvalidConfig(_))
        ));
    }

    #[test]
    fn fit_all_reports_expected_structure() {
        let samples = generate(&spec(bhf_params(0.8, 48.3, 64.2), 0.0, 100, 11)).unwrap();
        let outcomes = fit_all(&samples, freq(), &SimplexConfig::default());
        let kinds: Vec<ModelKind> = outcomes.iter().map(|o| o.model).collect();
        assert_eq!(kinds, FIT_ORDER.to_vec());
        let counts: Vec<usize> = outcomes.iter().map(|o| o.n_params).collect();
        assert_eq!(counts, vec![1, 2, 2, 3]);
        for o in &outcomes {
            assert!(o.result.is_ok(), "{:?} failed: {:?}", o.model, o.result);
        }
    }

    #[test]
    fn fit_all_generator_wins_at_zero_noise() {
        let samples = generate(&spec(bhf_params(0.8, 48.3, 64.2), 0.0, 100, 12)).unwrap();
        let outcomes = fit_all(&samples, freq(), &SimplexConfig::default());
        let rmses: Vec<(ModelKind, f64)> = outcomes
            .iter()
            .map(|o| (o.model, o.result.as_ref().unwrap().rmse_db))
            .collect();
        let bhf_rmse = rmses
            .iter()
            .find(|(k, _)| *k == ModelKind::Bhf)
            .unwrap()
            .1;
        for (kind, r) in &rmses {
            if *kind != ModelKind::Bhf {
                assert!(
                    bhf_rmse < *r,
                    "bhf ({bhf_rmse}) not strictly below {kind} ({r})"
                );
            }
        }
    }

    #[test]
    fn fit_all_noisy_bhf_rmse_tracks_noise_level() {
        let samples = generate(&spec(bhf_params(1.6, -1305.2, 1407.0), 3.0, 400, 13)).unwrap();
        let outcomes = fit_all(&samples, freq(), &SimplexConfig::default());
        let bhf_rmse = outcomes
            .iter()
            .find(|o| o.model == ModelKind::Bhf)
            .unwrap()
            .result
            .as_ref()
            .unwrap()
            .rmse_db;
        assert!((bhf_rmse - 3.0).abs() < 0.3, "rmse = {bhf_rmse}");
    }

    #[test]
    fn fit_all_captures_per_model_failures() {
        // Two samples: CI/ABG/FSPL-H can fit, BHF (3 params) cannot.
        let p = abg_params(2.0, 40.0);
        let d1 = DistanceM::new(10.0).unwrap();
        let d2 = DistanceM::new(100.0).unwrap();
        let samples = vec![
            sample_at(10.0, predict(&p, d1, freq()).db()),
            sample_at(100.0, predict(&p, d2, freq()).db()),
        ];
        let outcomes = fit_all(&samples, freq(), &SimplexConfig::default());
        assert!(outcomes[0].result.is_ok());
        assert!(outcomes[1].result.is_ok());
        assert!(outcomes[2].result.is_ok());
        assert!(outcomes[3].result.is_err());
    }

    #[test]
    fn residuals_are_orthogonal_to_design_columns() {
        let samples = generate(&spec(bhf_params(0.8, 48.3, 64.2), 5.0, 300, 14)).unwrap();
        let f = freq();

        // BHF columns.
        let fit = fit_bhf(&samples, f).unwrap();
        let resid: Vec<f64> = samples
            .iter()
            .map(|s| s.path_loss.db() - predict(&fit.params, s.distance, f).db())
            .collect();
        let resid_norm = resid.iter().map(|r| r * r).sum::<f64>().sqrt();
        let columns: Vec<Vec<f64>> = vec![
            samples
                .iter()
                .map(|s| 10.0 * s.distance.meters().log10())
                .collect(),
            vec![1.0; samples.len()],
            samples
                .iter()
                .map(|s| (s.distance.meters() / BHF_TANH_SCALE_M).tanh())
                .collect(),
        ];
        for col in &columns {
            let dot: f64 = resid.iter().zip(col).map(|(r, c)| r * c).sum();
            let col_norm = col.iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!(
                dot.abs() < 1e-6 * resid_norm * col_norm,
                "dot = {dot}, norms = {resid_norm} * {col_norm}"
            );
        }

        // CI regressor.
        let fit = fit_ci(&samples, f).unwrap();
        let resid: Vec<f64> = samples
            .iter()
            .map(|s| s.path_loss.db() - predict(&fit.params, s.distance, f).db())
            .collect();
        let resid_norm = resid.iter().map(|r| r * r).sum::<f64>().sqrt();
        let col = &columns[0];
        let dot: f64 = resid.iter().zip(col).map(|(r, c)| r * c).sum();
        let col_norm = col.iter().map(|c| c * c).sum::<f64>().sqrt();
        assert!(dot.abs() < 1e-6 * resid_norm * col_norm, "dot = {dot}");
    }

    #[test]
    fn linear_shift_moves_offsets_only() {
        let base = generate(&spec(bhf_params(0.8, 48.3, 64.2), 5.0, 300, 15)).unwrap();
        let k = 7.5;
        let shifted: Vec<PathLossSample> = base
            .iter()
            .map(|s| sample_at(s.distance.meters(), s.path_loss.db() + k))
            .collect();

        let (abg_a, abg_b) = match fit_abg(&base, freq(), 2.0).unwrap().params {
            ModelParams::Abg(p) => (p.alpha, p.beta),
            _ => unreachable!(),
        };
        let (abg_a2, abg_b2) = match fit_abg(&shifted, freq(), 2.0).unwrap().params {
            ModelParams::Abg(p) => (p.alpha, p.beta),
            _ => unreachable!(),
        };
        assert!((abg_a2 - abg_a).abs() < 1e-9);
        assert!((abg_b2 - abg_b - k).abs() < 1e-9);

        let (bhf_a, bhf_b, bhf_z) = match fit_bhf(&base, freq()).unwrap().params {
            ModelParams::Bhf(p) => (p.alpha, p.beta, p.zeta),
            _ => unreachable!(),
        };
        let (bhf_a2, bhf_b2, bhf_z2) = match fit_bhf(&shifted, freq()).unwrap().params {
            ModelParams::Bhf(p) => (p.alpha, p.beta, p.zeta),
            _ => unreachable!(),
        };
        assert!((bhf_a2 - bhf_a).abs() < 1e-8);
        assert!((bhf_b2 - bhf_b - k).abs() < 1e-7);
        assert!((bhf_z2 - bhf_z).abs() < 1e-7);
    }

    #[test]
    fn frequency_bookkeeping_does_not_move_slopes() {
        // Refitting at f' after shifting every PL by the model's own
        // frequency term difference leaves slope estimates unchanged.
        let f1 = freq();
        let f2 = FrequencyGhz::new(2.4).unwrap();
        let base = generate(&spec(bhf_params(0.8, 48.3, 64.2), 5.0, 300, 16)).unwrap();

        let shift20 = 20.0 * (f2.ghz() / f1.ghz()).log10();
        let shifted20: Vec<PathLossSample> = base
            .iter()
            .map(|s| sample_at(s.distance.meters(), s.path_loss.db() + shift20))
            .collect();

        let n1 = match fit_ci(&base, f1).unwrap().params {
            ModelParams::Ci(p) => p.n,
            _ => unreachable!(),
        };
        let n2 = match fit_ci(&shifted20, f2).unwrap().params {
            ModelParams::Ci(p) => p.n,
            _ => unreachable!(),
        };
        assert!((n1 - n2).abs() < 1e-9, "{n1} vs {n2}");

        let a1 = match fit_bhf(&base, f1).unwrap().params {
            ModelParams::Bhf(p) => p.alpha,
            _ => unreachable!(),
        };
        let a2 = match fit_bhf(&shifted20, f2).unwrap().params {
            ModelParams::Bhf(p) => p.alpha,
            _ => unreachable!(),
        };
        assert!((a1 - a2).abs() < 1e-8, "{a1} vs {a2}");

        let gamma = 2.0;
        let shift_gamma = 10.0 * gamma * (f2.ghz() / f1.ghz()).log10();
        let shifted_gamma: Vec<PathLossSample> = base
            .iter()
            .map(|s| sample_at(s.distance.meters(), s.path_loss.db() + shift_gamma))
            .collect();
        let aa1 = match fit_abg(&base, f1, gamma).unwrap().params {
            ModelParams::Abg(p) => p.alpha,
            _ => unreachable!(),
        };
        let aa2 = match fit_abg(&shifted_gamma, f2, gamma).unwrap().params {
            ModelParams::Abg(p) => p.alpha,
            _ => unreachable!(),
        };
        assert!((aa1 - aa2).abs() < 1e-9, "{aa1} vs {aa2}");
    }

    #[test]
    fn reported_rmse_matches_independent_recomputation() {
        let samples = generate(&spec(bhf_params(1.6, -1305.2, 1407.0), 4.0, 250, 17)).unwrap();
        for outcome in fit_all(&samples, freq(), &SimplexConfig::default()) {
            let fit = outcome.result.unwrap();
            let recomputed = rmse(&samples, &fit.params, freq()).unwrap();
            assert_eq!(fit.rmse_db, recomputed, "self-consistency for {:?}", outcome.model);
        }
    }
}
