//! The sweep loop: parallel HMC in every slot, then random adjacent swaps.

use std::ops::ControlFlow;
use std::path::PathBuf;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checkpoint::save_checkpoint;
use super::replica::{attempt_swap, Replica};
use super::trace::{RunTrace, SlotRecord, SweepRecord};
use super::RemdError;
use crate::hmc::{stream_rng, HmcError, Masses, StepSizeController};
use crate::model::PriorBox;
use crate::potential::Potential;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RemdConfig {
    /// Trajectories per slot per sweep.
    pub n_traj: usize,
    /// Verlet steps per trajectory.
    pub steps: usize,
    pub sweeps: usize,
    /// Retune every slot's `dt` before sweeps `k * retune_every + 1`; 0 disables.
    pub retune_every: usize,
    pub swap_seed: u64,
    /// Swap phase on or off (off gives independent chains for comparison).
    pub swaps: bool,
    #[serde(skip)]
    pub masses: Masses,
    pub controller: StepSizeController,
    /// Write a checkpoint after every this many sweeps; 0 disables.
    pub checkpoint_every: usize,
    pub checkpoint_path: Option<PathBuf>,
}

impl Default for RemdConfig {
    fn default() -> Self {
        Self {
            n_traj: 10,
            steps: 100,
            sweeps: 500,
            retune_every: 50,
            swap_seed: 0,
            swaps: true,
            masses: Masses::Unit,
            controller: StepSizeController::default(),
            checkpoint_every: 0,
            checkpoint_path: None,
        }
    }
}

impl RemdConfig {
    pub fn validate(&self) -> Result<(), RemdError> {
        if self.n_traj == 0 || self.steps == 0 {
            return Err(RemdError::InvalidConfig("N_traj and L must be at least 1".into()));
        }
        if self.checkpoint_every > 0 && self.checkpoint_path.is_none() {
            return Err(RemdError::InvalidConfig("checkpoint cadence set without a path".into()));
        }
        Ok(())
    }
}

/// A replica-exchange run in progress.
pub struct Remd<'a> {
    potential: &'a dyn Potential,
    prior: Option<&'a PriorBox>,
    eval: Option<&'a dyn Potential>,
    cfg: RemdConfig,
    /// Slots ordered coldest first.
    pub replicas: Vec<Replica>,
    /// Number of completed sweeps.
    pub sweep: usize,
}

impl<'a> Remd<'a> {
    /// `eval` is the held-out energy recorded alongside the training energy.
    pub fn new(
        potential: &'a dyn Potential,
        prior: Option<&'a PriorBox>,
        eval: Option<&'a dyn Potential>,
        replicas: Vec<Replica>,
        cfg: RemdConfig,
    ) -> Result<Self, RemdError> {
        cfg.validate()?;
        if replicas.is_empty() {
            return Err(RemdError::InvalidConfig("no replicas".into()));
        }
        if replicas.windows(2).any(|w| w[1].temperature < w[0].temperature) {
            return Err(RemdError::InvalidConfig("replicas must be ordered by temperature".into()));
        }
        Ok(Self { potential, prior, eval, cfg, replicas, sweep: 0 })
    }

    /// Continues from a checkpoint taken after `sweep` sweeps.
    pub fn resume(mut self, sweep: usize) -> Self {
        self.sweep = sweep;
        self
    }

    pub fn config(&self) -> &RemdConfig {
        &self.cfg
    }

    pub fn temperatures(&self) -> Vec<f64> {
        self.replicas.iter().map(|r| r.temperature).collect()
    }

    /// Retunes every slot in parallel. Slots that fail to tune keep the
    /// last step tried; their count is returned.
    pub fn retune_all(&mut self, tag: u64) -> usize {
        let (pot, prior, cfg) = (self.potential, self.prior, &self.cfg);
        self.replicas
            .par_iter_mut()
            .map(|r| match r.retune(pot, prior, cfg.steps, &cfg.masses, &cfg.controller, tag) {
                Ok(_) => 0,
                Err(HmcError::FailedToTune { dt, rate }) => {
                    log::warn!("T = {:.4e}: tuning stopped at dt = {dt:.3e}, acceptance {rate:.2}", r.temperature);
                    1
                }
                Err(e) => {
                    log::warn!("T = {:.4e}: {e}", r.temperature);
                    1
                }
            })
            .sum()
    }

    /// One sweep. Returns its record.
    pub fn step(&mut self) -> Result<SweepRecord, RemdError> {
        let s = self.sweep + 1;
        if self.cfg.retune_every > 0 && s > 1 && (s - 1) % self.cfg.retune_every == 0 {
            self.retune_all(s as u64);
        }
        let (pot, prior, cfg) = (self.potential, self.prior, &self.cfg);
        let accepted: Vec<usize> = self
            .replicas
            .par_iter_mut()
            .map(|r| r.run(pot, prior, cfg.steps, &cfg.masses, cfg.n_traj))
            .collect();

        let n = self.replicas.len();
        let mut attempts = vec![0u64; n];
        let mut accepts = vec![0u64; n];
        if self.cfg.swaps && n >= 2 {
            let mut rng = stream_rng(self.cfg.swap_seed, s as u64);
            for _ in 0..n {
                let j = rng.random_range(0..n - 1);
                let (lo, hi) = self.replicas.split_at_mut(j + 1);
                attempts[j] += 1;
                if attempt_swap(&mut lo[j], &mut hi[0], &mut rng) {
                    accepts[j] += 1;
                }
            }
        }

        let eval = self.eval;
        let e_test: Vec<Option<f64>> = self
            .replicas
            .par_iter()
            .map(|r| eval.map(|q| q.energy(r.w())))
            .collect();
        let slots = self
            .replicas
            .iter()
            .enumerate()
            .map(|(i, r)| SlotRecord {
                temperature: r.temperature,
                identity: r.identity,
                e_train: r.energy(),
                e_test: e_test[i],
                acceptance: accepted[i] as f64 / self.cfg.n_traj as f64,
                dt: r.dt,
                swap_attempts: attempts[i],
                swap_accepts: accepts[i],
            })
            .collect();
        self.sweep = s;

        if self.cfg.checkpoint_every > 0 && s % self.cfg.checkpoint_every == 0 {
            if let Some(path) = &self.cfg.checkpoint_path {
                save_checkpoint(path, s, &self.replicas)?;
            }
        }
        Ok(SweepRecord { sweep: s, slots })
    }

    /// Runs until `cfg.sweeps` sweeps are complete or the observer breaks.
    pub fn run<F>(&mut self, mut observer: F) -> Result<RunTrace, RemdError>
    where
        F: FnMut(&SweepRecord, &[Replica]) -> ControlFlow<()>,
    {
        let mut trace = RunTrace::new(self.temperatures());
        while self.sweep < self.cfg.sweeps {
            let rec = self.step()?;
            let flow = observer(&rec, &self.replicas);
            trace.records.push(rec);
            if flow.is_break() {
                break;
            }
        }
        Ok(trace)
    }
}

/// Runs `cfg.sweeps` sweeps over `replicas` (ordered by temperature).
pub fn run_remd<F>(
    potential: &dyn Potential,
    prior: Option<&PriorBox>,
    eval: Option<&dyn Potential>,
    replicas: Vec<Replica>,
    cfg: RemdConfig,
    observer: F,
) -> Result<(RunTrace, Vec<Replica>), RemdError>
where
    F: FnMut(&SweepRecord, &[Replica]) -> ControlFlow<()>,
{
    let mut run = Remd::new(potential, prior, eval, replicas, cfg)?;
    let trace = run.run(observer)?;
    Ok((trace, run.replicas))
}
