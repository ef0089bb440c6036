//! The sequential lambda sweep and repeated evidence runs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bridge::{ti_integrand, BridgePotential};
use super::quadrature::{lambda_grid, simpson, simpson_std_error};
use super::reference::log_z0;
use super::stiffness::{fit_stiffness, FitConfig, StiffnessDiag};
use super::TiError;
use crate::hmc::{derive_seed, hmc_trajectory, ChainState, HmcConfig, HmcError, Masses, StepSizeController};
use crate::model::PriorBox;
use crate::potential::Potential;
use crate::stats::blocked_mean;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TiConfig {
    /// Number of distributions including both endpoints.
    pub n_lambdas: usize,
    pub burn_in: usize,
    pub samples: usize,
    pub steps: usize,
    /// Retune `dt` before distributions `0, k, 2k, ...`.
    pub retune_every: usize,
    pub dt0: f64,
    pub seed: u64,
    pub controller: StepSizeController,
    /// Start each distribution from the previous one's final state.
    pub warm_start: bool,
    /// Reject proposals outside the prior box during bridge sampling.
    pub use_box: bool,
    /// Blocks for the per-distribution standard errors.
    pub blocks: usize,
    /// Relative step jitter, see [`HmcConfig::jitter`].
    pub jitter: f64,
}

impl Default for TiConfig {
    fn default() -> Self {
        Self {
            n_lambdas: 102,
            burn_in: 100,
            samples: 100,
            steps: 100,
            retune_every: 10,
            dt0: 0.01,
            seed: 0,
            controller: StepSizeController::default(),
            warm_start: true,
            use_box: true,
            blocks: 10,
            jitter: 0.0,
        }
    }
}

impl TiConfig {
    pub fn validate(&self) -> Result<(), TiError> {
        if self.n_lambdas < 3 {
            return Err(TiError::GridMismatch(format!("need at least 3 distributions, got {}", self.n_lambdas)));
        }
        if self.samples < 4 {
            return Err(TiError::InsufficientSamples { needed: 4, got: self.samples });
        }
        if self.steps == 0 || !(self.dt0 > 0.0) {
            return Err(TiError::InvalidConfig("steps and dt0 must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.jitter) {
            return Err(TiError::InvalidConfig("jitter must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaPoint {
    pub lambda: f64,
    pub mean: f64,
    pub std_error: f64,
    pub acceptance: f64,
    pub dt: f64,
}

/// One full sweep from `lambda = 0` to `lambda = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiRun {
    /// `F = f0 + integral`.
    pub f: f64,
    /// Reference free energy `J0 - log Z0`.
    pub f0: f64,
    /// `int_1^0 <dJ/dlambda> dlambda`.
    pub integral: f64,
    pub integral_std_error: f64,
    pub log_z0: f64,
    pub j0: f64,
    pub points: Vec<LambdaPoint>,
}

/// Mean of the integrand under the bridge distribution at `lambda`, sampled
/// by continuing `state` (whose cached energy must belong to this bridge).
#[allow(clippy::too_many_arguments)]
pub fn ti_integrand_at<P: Potential + ?Sized>(
    base: &P,
    stiff: &StiffnessDiag,
    prior: Option<&PriorBox>,
    lambda: f64,
    state: &mut ChainState,
    hcfg: &HmcConfig,
    burn_in: usize,
    samples: usize,
    blocks: usize,
) -> Result<LambdaPoint, TiError> {
    let bridge = BridgePotential::new(base, stiff, lambda);
    let mut index = 0u64;
    for _ in 0..burn_in {
        hmc_trajectory(&bridge, state, prior, hcfg, index);
        index += 1;
    }
    let mut j = base.energy(&state.w);
    let mut values = Vec::with_capacity(samples);
    let mut accepted = 0usize;
    for _ in 0..samples {
        if hmc_trajectory(&bridge, state, prior, hcfg, index).accepted {
            accepted += 1;
            j = base.energy(&state.w);
        }
        index += 1;
        values.push(ti_integrand(stiff, &state.w, j));
    }
    let est = blocked_mean(&values, blocks).ok_or(TiError::InsufficientSamples { needed: 4, got: samples })?;
    Ok(LambdaPoint {
        lambda,
        mean: est.mean,
        std_error: est.std_error,
        acceptance: accepted as f64 / samples as f64,
        dt: hcfg.dt,
    })
}

pub fn run_ti<P: Potential + ?Sized>(
    base: &P,
    stiff: &StiffnessDiag,
    prior: Option<&PriorBox>,
    cfg: &TiConfig,
) -> Result<TiRun, TiError> {
    cfg.validate()?;
    let box_for_sampling = if cfg.use_box { prior } else { None };
    let lambdas = lambda_grid(cfg.n_lambdas);
    let mut state = ChainState::new(&BridgePotential::new(base, stiff, 0.0), stiff.w0.clone())?;
    let mut dt = cfg.dt0;
    let mut points = Vec::with_capacity(lambdas.len());
    for (i, &lambda) in lambdas.iter().enumerate() {
        let bridge = BridgePotential::new(base, stiff, lambda);
        if !cfg.warm_start {
            state.w.copy_from_slice(&stiff.w0);
        }
        state.refresh(&bridge)?;
        let mut hcfg = HmcConfig {
            temperature: 1.0,
            dt,
            steps: cfg.steps,
            masses: Masses::Unit,
            seed: derive_seed(cfg.seed, i as u64),
            jitter: cfg.jitter,
        };
        if cfg.retune_every > 0 && i % cfg.retune_every == 0 {
            match cfg.controller.adapt_step(&bridge, &state, box_for_sampling, &hcfg, i as u64) {
                Ok(rep) => hcfg.dt = rep.dt,
                Err(HmcError::FailedToTune { dt, rate }) => {
                    log::warn!("lambda = {lambda:.3}: tuning stopped at dt = {dt:.3e}, acceptance {rate:.2}");
                    hcfg.dt = dt;
                }
                Err(e) => return Err(e.into()),
            }
            dt = hcfg.dt;
        }
        points.push(ti_integrand_at(
            base,
            stiff,
            box_for_sampling,
            lambda,
            &mut state,
            &hcfg,
            cfg.burn_in,
            cfg.samples,
            cfg.blocks,
        )?);
    }
    let means: Vec<f64> = points.iter().map(|p| p.mean).collect();
    let errors: Vec<f64> = points.iter().map(|p| p.std_error).collect();
    let integral = -simpson(&lambdas, &means)?;
    let integral_std_error = simpson_std_error(&lambdas, &errors)?;
    let log_z0 = log_z0(stiff, prior)?;
    let f0 = stiff.j0 - log_z0;
    Ok(TiRun { f: f0 + integral, f0, integral, integral_std_error, log_z0, j0: stiff.j0, points })
}

/// `repeats` independent evidence runs from the minimum `w0`, each with its
/// own stiffness fit and bridge sweep. Runs execute in parallel and are
/// reproducible from `(fit.seed, ti.seed)` regardless of thread count.
pub fn ti_repeats<P: Potential + ?Sized>(
    base: &P,
    w0: &[f64],
    prior: Option<&PriorBox>,
    fit: &FitConfig,
    ti: &TiConfig,
    repeats: usize,
) -> Result<Vec<(StiffnessDiag, TiRun)>, TiError> {
    if repeats == 0 {
        return Err(TiError::InvalidConfig("need at least one repeat".into()));
    }
    (0..repeats)
        .into_par_iter()
        .map(|r| {
            let fit = FitConfig { seed: derive_seed(fit.seed, r as u64), ..fit.clone() };
            let ti = TiConfig { seed: derive_seed(ti.seed, 1 << 32 | r as u64), ..ti.clone() };
            let stiff = fit_stiffness(base, w0, prior, &fit)?;
            let run = run_ti(base, &stiff, prior, &ti)?;
            Ok((stiff, run))
        })
        .collect()
}
