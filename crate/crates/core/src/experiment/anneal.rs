//! Cooling with a validation-based stopping rule.

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::hmc::{derive_seed, hmc_trajectory, ChainState, HmcConfig, HmcError, StepSizeController};
use crate::model::PriorBox;
use crate::potential::Potential;

/// One temperature of a cooling run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealPoint {
    pub temperature: f64,
    /// Mean validation energy over the trajectories at this temperature.
    pub validation_energy: f64,
    /// Parameters at the end of this temperature.
    #[serde(skip)]
    pub w: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealStop {
    pub index: usize,
    pub temperature: f64,
    /// False when the smoothed validation energy never rose, in which case
    /// the coldest point is returned.
    pub found_minimum: bool,
    pub smoothed: Vec<f64>,
}

/// Centered moving average, truncated at the ends.
pub fn moving_average(xs: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    (0..xs.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(xs.len());
            xs[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

/// Scans `points` (hottest first) until the smoothed validation energy
/// rises, and returns the best point seen before the rise.
pub fn anneal_stop(points: &[AnnealPoint], window: usize) -> Result<AnnealStop, ExperimentError> {
    if points.is_empty() {
        return Err(ExperimentError::InsufficientSamples { needed: 1, got: 0 });
    }
    if window == 0 || window % 2 == 0 {
        return Err(ExperimentError::InvalidConfig(format!("smoothing window {window} must be odd")));
    }
    if points.windows(2).any(|p| p[1].temperature >= p[0].temperature) {
        return Err(ExperimentError::InvalidConfig("anneal trace must be ordered hottest first".into()));
    }
    let raw: Vec<f64> = points.iter().map(|p| p.validation_energy).collect();
    let smoothed = moving_average(&raw, window);
    let rise = (1..smoothed.len()).find(|&i| smoothed[i] > smoothed[i - 1]);
    let (index, found_minimum) = match rise {
        Some(stop) => {
            let best = (0..stop).min_by(|&a, &b| smoothed[a].total_cmp(&smoothed[b])).unwrap();
            (best, true)
        }
        None => (points.len() - 1, false),
    };
    Ok(AnnealStop { index, temperature: points[index].temperature, found_minimum, smoothed })
}

/// Cools a single chain through `temperatures` (hottest first), running
/// `trajectories` HMC trajectories at each and recording the mean
/// validation energy.
#[allow(clippy::too_many_arguments)]
pub fn cool<P: Potential + ?Sized, V: Potential + ?Sized>(
    potential: &P,
    validation: &V,
    prior: Option<&PriorBox>,
    w0: Vec<f64>,
    temperatures: &[f64],
    trajectories: usize,
    steps: usize,
    controller: &StepSizeController,
    seed: u64,
) -> Result<Vec<AnnealPoint>, ExperimentError> {
    let mut state = ChainState::new(potential, w0).map_err(crate::remd::RemdError::from)?;
    let mut dt = 0.01;
    let mut out = Vec::with_capacity(temperatures.len());
    for (i, &t) in temperatures.iter().enumerate() {
        let mut cfg = HmcConfig { temperature: t, dt, steps, masses: Default::default(), seed: derive_seed(seed, i as u64), jitter: 0.0 };
        match controller.adapt_step(potential, &state, prior, &cfg, i as u64) {
            Ok(rep) => cfg.dt = rep.dt,
            Err(HmcError::FailedToTune { dt, .. }) => cfg.dt = dt,
            Err(e) => return Err(crate::remd::RemdError::from(e).into()),
        }
        dt = cfg.dt;
        let mut total = 0.0;
        for k in 0..trajectories {
            hmc_trajectory(potential, &mut state, prior, &cfg, k as u64);
            total += validation.energy(&state.w);
        }
        out.push(AnnealPoint { temperature: t, validation_energy: total / trajectories as f64, w: state.w.clone() });
    }
    Ok(out)
}
