//! Damped-dynamics energy minimizer.
//!
//! Single Verlet steps from rest; a step that lowers the energy lengthens
//! `dt` by a fixed increment, a step that does not is undone, the momenta
//! are zeroed and `dt` shrinks by a factor. Related to FIRE but without its
//! velocity mixing: momenta are only ever zeroed, never re-aimed along the force.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hmc::{integrate, Masses};
use crate::potential::Potential;

#[derive(Debug, Error)]
pub enum MinimizeError {
    #[error("non-finite energy at the starting point")]
    NonFiniteEnergy,
    #[error("invalid minimizer configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RMinConfig {
    pub steps: usize,
    pub dt0: f64,
    pub dt_increment: f64,
    pub dt_decay: f64,
    /// Stop once the energy falls below this.
    pub target_energy: f64,
    /// Stop when the relative improvement over `stall_window` steps is below
    /// `stall_tolerance`.
    pub stall_window: usize,
    pub stall_tolerance: f64,
}

impl Default for RMinConfig {
    fn default() -> Self {
        Self {
            steps: 1000,
            dt0: 0.1,
            dt_increment: 0.05,
            dt_decay: 0.95,
            target_energy: 1e-10,
            stall_window: 100,
            stall_tolerance: 1e-12,
        }
    }
}

impl RMinConfig {
    pub fn validate(&self) -> Result<(), MinimizeError> {
        let bad = |m: &str| Err(MinimizeError::InvalidConfig(m.into()));
        if !(self.dt0 > 0.0 && self.dt0.is_finite()) {
            return bad("dt0 must be positive");
        }
        if !(self.dt_increment >= 0.0) {
            return bad("dt increment must be non-negative");
        }
        if !(self.dt_decay > 0.0 && self.dt_decay < 1.0) {
            return bad("dt decay must lie in (0, 1)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    StepLimit,
    TargetReached,
    Stalled,
}

/// State after one step: the retained energy and the step size for the next step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RMinStep {
    pub step: usize,
    pub energy: f64,
    pub dt: f64,
    pub downhill: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RMinResult {
    pub w: Vec<f64>,
    pub energy: f64,
    pub initial_energy: f64,
    pub trace: Vec<RMinStep>,
    pub stop: StopReason,
}

pub fn rmin<P: Potential + ?Sized>(
    w0: &[f64],
    potential: &P,
    cfg: &RMinConfig,
) -> Result<RMinResult, MinimizeError> {
    cfg.validate()?;
    let d = w0.len();
    let mut w = w0.to_vec();
    let mut grad = vec![0.0; d];
    let mut energy = potential.energy_grad(&w, &mut grad);
    if !energy.is_finite() || grad.iter().any(|g| !g.is_finite()) {
        return Err(MinimizeError::NonFiniteEnergy);
    }
    let initial_energy = energy;
    let mut p = vec![0.0; d];
    let mut w_save = vec![0.0; d];
    let mut g_save = vec![0.0; d];
    let mut dt = cfg.dt0;
    let mut trace = Vec::with_capacity(cfg.steps);
    let mut stop = StopReason::StepLimit;

    for step in 1..=cfg.steps {
        if energy < cfg.target_energy {
            stop = StopReason::TargetReached;
            break;
        }
        w_save.copy_from_slice(&w);
        g_save.copy_from_slice(&grad);
        let e_save = energy;
        let stepped = integrate(potential, &mut w, &mut p, &mut grad, dt, 1, &Masses::Unit);
        let downhill = matches!(stepped, Ok(e) if e < e_save);
        if downhill {
            energy = stepped.unwrap_or(e_save);
            dt += cfg.dt_increment;
        } else {
            p.iter_mut().for_each(|x| *x = 0.0);
            w.copy_from_slice(&w_save);
            grad.copy_from_slice(&g_save);
            energy = e_save;
            dt *= cfg.dt_decay;
        }
        trace.push(RMinStep { step, energy, dt, downhill });

        if cfg.stall_window > 0 && step >= cfg.stall_window {
            let before = if step == cfg.stall_window {
                initial_energy
            } else {
                trace[step - cfg.stall_window - 1].energy
            };
            if before - energy <= cfg.stall_tolerance * before.abs() {
                stop = StopReason::Stalled;
                break;
            }
        }
    }
    if stop == StopReason::StepLimit && energy < cfg.target_energy {
        stop = StopReason::TargetReached;
    }
    Ok(RMinResult { w, energy, initial_energy, trace, stop })
}
