//! Acceptance-targeted step-size tuning from probe trajectories.
//!
//! Probes run on a copy of the chain state with their own random stream, so
//! tuning never moves the chain being sampled.

use serde::{Deserialize, Serialize};

use super::sampler::{hmc_trajectory, ChainState, HmcConfig};
use super::{derive_seed, HmcError};
use crate::model::PriorBox;
use crate::potential::Potential;

const PROBE_TAG: u64 = 0x5052_4f42_4553; // "PROBES"

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSizeController {
    /// Inclusive acceptance band.
    pub low: f64,
    pub high: f64,
    pub probe_batch: usize,
    pub grow: f64,
    pub shrink: f64,
    pub max_rounds: usize,
    /// Batches pooled at an unchanged dt before an in-band rate is accepted.
    pub confirm_batches: usize,
}

impl Default for StepSizeController {
    fn default() -> Self {
        Self { low: 0.6, high: 0.7, probe_batch: 20, grow: 1.1, shrink: 0.9, max_rounds: 200, confirm_batches: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuneReport {
    pub dt: f64,
    pub rate: f64,
    pub rounds: usize,
}

impl StepSizeController {
    /// One controller decision: `None` when `rate` is inside the band.
    pub fn next_dt(&self, dt: f64, rate: f64) -> Option<f64> {
        if rate > self.high {
            Some(dt * self.grow)
        } else if rate < self.low {
            Some(dt * self.shrink)
        } else {
            None
        }
    }

    /// Adjusts `cfg.dt` until a probe batch lands in the band.
    ///
    /// The first batch at a new `dt` decides on its own, which keeps coarse
    /// moves fast. Once a batch lands in the band, probing continues at that
    /// `dt` until `confirm_batches` batches are pooled, and only the pooled
    /// rate decides.
    ///
    /// `tag` separates the probe streams of successive tuning calls on the
    /// same chain. The probe chain carries on across rounds from a copy of
    /// `state`; `state` itself is not touched.
    pub fn adapt_step<P: Potential + ?Sized>(
        &self,
        potential: &P,
        state: &ChainState,
        prior: Option<&PriorBox>,
        cfg: &HmcConfig,
        tag: u64,
    ) -> Result<TuneReport, HmcError> {
        let mut probe = state.clone();
        let mut pcfg = cfg.clone();
        pcfg.seed = derive_seed(cfg.seed, PROBE_TAG ^ tag.rotate_left(17));
        let window = self.confirm_batches.max(1) * self.probe_batch;
        let mut index = 0u64;
        let mut rate = f64::NAN;
        // acceptance pooled over the batches run at the current dt
        let (mut pooled_acc, mut pooled_n) = (0usize, 0usize);
        for round in 1..=self.max_rounds {
            for _ in 0..self.probe_batch {
                if hmc_trajectory(potential, &mut probe, prior, &pcfg, index).accepted {
                    pooled_acc += 1;
                }
                pooled_n += 1;
                index += 1;
            }
            rate = pooled_acc as f64 / pooled_n as f64;
            if pooled_n > self.probe_batch && pooled_n < window {
                continue;
            }
            match self.next_dt(pcfg.dt, rate) {
                None if pooled_n >= window => return Ok(TuneReport { dt: pcfg.dt, rate, rounds: round }),
                None => {}
                Some(dt) => {
                    pcfg.dt = dt;
                    pooled_acc = 0;
                    pooled_n = 0;
                }
            }
        }
        Err(HmcError::FailedToTune { dt: pcfg.dt, rate })
    }
}
