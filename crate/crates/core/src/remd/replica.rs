//! Replica slots, the swap rule and replica initialization.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::RemdError;
use crate::hmc::{hmc_trajectory, ChainState, HmcConfig, HmcError, Masses, StepSizeController, TuneReport};
use crate::minimizer::{rmin, RMinConfig};
use crate::model::PriorBox;
use crate::potential::Potential;

/// One temperature slot of the ladder and the chain currently occupying it.
///
/// The temperature, tuned step, seed and trajectory counter belong to the
/// slot; the chain state and its `identity` label move between slots on swaps.
#[derive(Debug, Clone)]
pub struct Replica {
    pub identity: usize,
    pub temperature: f64,
    pub dt: f64,
    pub seed: u64,
    /// Index of the next trajectory in this slot's random stream.
    pub counter: u64,
    pub state: ChainState,
}

impl Replica {
    pub fn new<P: Potential + ?Sized>(
        potential: &P,
        w: Vec<f64>,
        temperature: f64,
        dt: f64,
        seed: u64,
        identity: usize,
    ) -> Result<Self, RemdError> {
        Ok(Self { identity, temperature, dt, seed, counter: 0, state: ChainState::new(potential, w)? })
    }

    pub fn energy(&self) -> f64 {
        self.state.energy
    }

    pub fn w(&self) -> &[f64] {
        &self.state.w
    }

    pub fn hmc_config(&self, steps: usize, masses: &Masses) -> HmcConfig {
        HmcConfig { temperature: self.temperature, dt: self.dt, steps, masses: masses.clone(), seed: self.seed, jitter: 0.0 }
    }

    /// Runs `n` trajectories; returns how many were accepted.
    pub fn run<P: Potential + ?Sized>(
        &mut self,
        potential: &P,
        prior: Option<&PriorBox>,
        steps: usize,
        masses: &Masses,
        n: usize,
    ) -> usize {
        let cfg = self.hmc_config(steps, masses);
        let mut accepted = 0;
        for _ in 0..n {
            if hmc_trajectory(potential, &mut self.state, prior, &cfg, self.counter).accepted {
                accepted += 1;
            }
            self.counter += 1;
        }
        accepted
    }

    /// Retunes `dt` from probe trajectories. On `FailedToTune` the slot still
    /// adopts the last step tried, and the error is returned for reporting.
    pub fn retune<P: Potential + ?Sized>(
        &mut self,
        potential: &P,
        prior: Option<&PriorBox>,
        steps: usize,
        masses: &Masses,
        controller: &StepSizeController,
        tag: u64,
    ) -> Result<TuneReport, HmcError> {
        let cfg = self.hmc_config(steps, masses);
        match controller.adapt_step(potential, &self.state, prior, &cfg, tag) {
            Ok(rep) => {
                self.dt = rep.dt;
                Ok(rep)
            }
            Err(HmcError::FailedToTune { dt, rate }) => {
                self.dt = dt;
                Err(HmcError::FailedToTune { dt, rate })
            }
            Err(e) => Err(e),
        }
    }
}

/// Log of the swap acceptance probability between slots at `t_j` and `t_j1`.
pub fn swap_log_acceptance(t_j: f64, t_j1: f64, e_j: f64, e_j1: f64) -> f64 {
    (1.0 / t_j - 1.0 / t_j1) * (e_j - e_j1)
}

/// Metropolis swap of the chains in two slots. Consumes exactly one uniform
/// draw whatever the outcome.
pub fn attempt_swap<R: Rng + ?Sized>(a: &mut Replica, b: &mut Replica, rng: &mut R) -> bool {
    let log_acc = swap_log_acceptance(a.temperature, b.temperature, a.energy(), b.energy());
    let u: f64 = rng.random();
    let accept = log_acc >= 0.0 || u.ln() < log_acc;
    if accept {
        a.state.swap_contents(&mut b.state);
        std::mem::swap(&mut a.identity, &mut b.identity);
    }
    accept
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InitConfig {
    /// Minimize before sampling; `None` starts sampling from `w0` directly.
    pub rmin: Option<RMinConfig>,
    pub burn_in: usize,
    pub steps: usize,
    pub dt0: f64,
    #[serde(skip)]
    pub masses: Masses,
    pub controller: StepSizeController,
}

impl Default for InitConfig {
    fn default() -> Self {
        Self {
            rmin: Some(RMinConfig::default()),
            burn_in: 100,
            steps: 100,
            dt0: 0.01,
            masses: Masses::Unit,
            controller: StepSizeController::default(),
        }
    }
}

/// Fraction of the half width coordinates are clipped to when a minimizer
/// run ends outside the prior box.
const CLIP_FRACTION: f64 = 0.999;

/// Minimize, tune `dt`, burn in, then tune again at the equilibrated state.
pub fn init_replica<P: Potential + ?Sized>(
    potential: &P,
    prior: Option<&PriorBox>,
    w0: Vec<f64>,
    temperature: f64,
    seed: u64,
    identity: usize,
    cfg: &InitConfig,
) -> Result<Replica, RemdError> {
    let mut w = match &cfg.rmin {
        Some(rc) => rmin(&w0, potential, rc)?.w,
        None => w0,
    };
    if let Some(b) = prior {
        for (i, x) in w.iter_mut().enumerate() {
            let h = CLIP_FRACTION * b.half_width(i);
            *x = x.clamp(-h, h);
        }
    }
    let mut r = Replica::new(potential, w, temperature, cfg.dt0, seed, identity)?;
    r.retune(potential, prior, cfg.steps, &cfg.masses, &cfg.controller, 0)?;
    r.run(potential, prior, cfg.steps, &cfg.masses, cfg.burn_in);
    if cfg.burn_in > 0 {
        if let Err(e) = r.retune(potential, prior, cfg.steps, &cfg.masses, &cfg.controller, 1) {
            log::warn!("replica {identity} at T = {temperature}: {e}");
        }
    }
    Ok(r)
}
