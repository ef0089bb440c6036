//! Diagonal stiffness of the Gaussian reference, fitted from sampled
//! marginal variances around a minimum.

use serde::{Deserialize, Serialize};

use super::TiError;
use crate::hmc::{hmc_trajectory, ChainState, HmcConfig, HmcError, Masses, StepSizeController};
use crate::model::PriorBox;
use crate::potential::Potential;

/// Reference quadratic `J0 + sum_i k_i (w_i - w0_i)^2 / 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StiffnessDiag {
    pub w0: Vec<f64>,
    pub k: Vec<f64>,
    /// `J(w0)`.
    pub j0: f64,
    /// Coordinates whose sampled variance hit the floor.
    #[serde(default)]
    pub degenerate: Vec<usize>,
    /// Fraction of fit samples lying outside the prior box, if one was given.
    #[serde(default)]
    pub outside_box_fraction: Option<f64>,
}

impl StiffnessDiag {
    pub fn new(w0: Vec<f64>, k: Vec<f64>, j0: f64) -> Result<Self, TiError> {
        if w0.len() != k.len() {
            return Err(TiError::InvalidConfig(format!("{} centres for {} stiffnesses", w0.len(), k.len())));
        }
        if let Some(i) = k.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(TiError::DegenerateDirection { index: i, variance: 1.0 / k[i] });
        }
        Ok(Self { w0, k, j0, degenerate: Vec::new(), outside_box_fraction: None })
    }

    pub fn dim(&self) -> usize {
        self.k.len()
    }

    /// `sum_i k_i (w_i - w0_i)^2 / 2`.
    pub fn quadratic(&self, w: &[f64]) -> f64 {
        w.iter()
            .zip(&self.w0)
            .zip(&self.k)
            .map(|((x, c), k)| 0.5 * k * (x - c) * (x - c))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub burn_in: usize,
    pub samples: usize,
    pub steps: usize,
    pub dt0: f64,
    pub seed: u64,
    pub controller: StepSizeController,
    /// Smallest admitted `<(w - w0)^2>`.
    pub variance_floor: f64,
    /// Relative step jitter of the fit chain, see [`HmcConfig::jitter`].
    pub jitter: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            burn_in: 1000,
            samples: 1000,
            steps: 100,
            dt0: 0.01,
            seed: 0,
            controller: StepSizeController::default(),
            variance_floor: 1e-12,
            jitter: 0.0,
        }
    }
}

/// Samples `exp(-J)` at unit temperature with no box and sets
/// `k_i = 1 / <(w_i - w0_i)^2>`. `prior` is only used for the
/// outside-the-box diagnostic.
pub fn fit_stiffness<P: Potential + ?Sized>(
    potential: &P,
    w0: &[f64],
    prior: Option<&PriorBox>,
    cfg: &FitConfig,
) -> Result<StiffnessDiag, TiError> {
    if cfg.samples == 0 {
        return Err(TiError::InsufficientSamples { needed: 1, got: 0 });
    }
    let j0 = potential.energy(w0);
    let mut state = ChainState::new(potential, w0.to_vec())?;
    let mut hcfg = HmcConfig { temperature: 1.0, dt: cfg.dt0, steps: cfg.steps, masses: Masses::Unit, seed: cfg.seed, jitter: cfg.jitter };
    hcfg.validate(w0.len())?;
    let tune = |state: &ChainState, hcfg: &mut HmcConfig, tag| match cfg.controller.adapt_step(potential, state, None, hcfg, tag) {
        Ok(rep) => hcfg.dt = rep.dt,
        Err(HmcError::FailedToTune { dt, rate }) => {
            log::warn!("stiffness fit: tuning stopped at dt = {dt:.3e}, acceptance {rate:.2}");
            hcfg.dt = dt;
        }
        Err(e) => log::warn!("stiffness fit: {e}"),
    };
    tune(&state, &mut hcfg, 0);
    let mut index = 0u64;
    for _ in 0..cfg.burn_in {
        hmc_trajectory(potential, &mut state, None, &hcfg, index);
        index += 1;
    }
    if cfg.burn_in > 0 {
        tune(&state, &mut hcfg, 1);
    }
    let d = w0.len();
    let mut sum_sq = vec![0.0; d];
    let mut outside = 0usize;
    for _ in 0..cfg.samples {
        hmc_trajectory(potential, &mut state, None, &hcfg, index);
        index += 1;
        for ((s, x), c) in sum_sq.iter_mut().zip(&state.w).zip(w0) {
            *s += (x - c) * (x - c);
        }
        if prior.is_some_and(|b| !b.contains(&state.w)) {
            outside += 1;
        }
    }
    let mut degenerate = Vec::new();
    let mut k = Vec::with_capacity(d);
    for (i, s) in sum_sq.iter().enumerate() {
        let v = s / cfg.samples as f64;
        if !v.is_finite() {
            return Err(TiError::DegenerateDirection { index: i, variance: v });
        }
        if v < cfg.variance_floor {
            degenerate.push(i);
        }
        k.push(1.0 / v.max(cfg.variance_floor));
    }
    if !degenerate.is_empty() {
        log::warn!("stiffness fit: {} directions at the variance floor", degenerate.len());
    }
    Ok(StiffnessDiag {
        w0: w0.to_vec(),
        k,
        j0,
        degenerate,
        outside_box_fraction: prior.map(|_| outside as f64 / cfg.samples as f64),
    })
}
