//! The standard-optimization baseline: many minimizer restarts from the
//! conventional initialization, summarized by their mean test energy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::hmc::derive_seed;
use crate::minimizer::{rmin, RMinConfig};
use crate::potential::Potential;
use crate::stats::{mean, variance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineMode {
    /// Restart until `keep` runs reach zero training energy.
    UntilZero,
    /// Run a fixed number of restarts and keep the `keep` lowest.
    BestOf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    /// `None` picks `UntilZero` up to 500 training images and `BestOf` above.
    pub mode: Option<BaselineMode>,
    pub keep: usize,
    /// Restarts in `BestOf` mode.
    pub restarts: usize,
    /// Give up in `UntilZero` mode after this many restarts.
    pub restart_cap: usize,
    /// Training energy counted as zero.
    pub zero_energy: f64,
    pub rmin: RMinConfig,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            mode: None,
            keep: 100,
            restarts: 4000,
            restart_cap: 2000,
            zero_energy: 1e-10,
            // reaching 1e-10 on 50 images takes up to a few thousand steps
            rmin: RMinConfig { steps: 10_000, ..RMinConfig::default() },
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let fail = |m: &str| Err(ExperimentError::InvalidConfig(format!("baseline: {m}")));
        if self.keep == 0 {
            return fail("keep must be positive");
        }
        if self.restarts < self.keep || self.restart_cap < self.keep {
            return fail("restarts and restart_cap must be at least keep");
        }
        if !(self.zero_energy >= 0.0) {
            return fail("zero_energy must be non-negative");
        }
        self.rmin.validate().map_err(|e| ExperimentError::InvalidConfig(format!("baseline.rmin: {e}")))
    }

    pub fn mode_for(&self, n_train: usize) -> BaselineMode {
        self.mode.unwrap_or(if n_train <= 500 { BaselineMode::UntilZero } else { BaselineMode::BestOf })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineSolution {
    pub restart: usize,
    pub seed: u64,
    pub e_train: f64,
    pub e_test: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineSummary {
    pub mode: BaselineMode,
    pub restarts_run: usize,
    pub mean_test_energy: f64,
    pub test_energy_std_error: f64,
    pub mean_train_energy: f64,
    pub solutions: Vec<BaselineSolution>,
}

impl BaselineSummary {
    fn new(mode: BaselineMode, restarts_run: usize, solutions: Vec<BaselineSolution>) -> Self {
        let test: Vec<f64> = solutions.iter().map(|s| s.e_test).collect();
        let train: Vec<f64> = solutions.iter().map(|s| s.e_train).collect();
        let se = if test.len() > 1 { (variance(&test) / test.len() as f64).sqrt() } else { f64::NAN };
        Self {
            mode,
            restarts_run,
            mean_test_energy: mean(&test),
            test_energy_std_error: se,
            mean_train_energy: mean(&train),
            solutions,
        }
    }
}

/// Restarts per parallel batch. Results depend only on the restart index,
/// so the outcome does not depend on the thread count.
const BATCH: usize = 16;

/// Runs the baseline. `init(seed)` draws a starting point; restart `r`
/// uses `derive_seed(seed, r)`. Returns the summary and the kept minima
/// in the same order as `summary.solutions`.
pub fn baseline_optimize<P, Q, I>(
    train: &P,
    test: &Q,
    init: I,
    n_train: usize,
    cfg: &BaselineConfig,
    seed: u64,
) -> Result<(BaselineSummary, Vec<Vec<f64>>), ExperimentError>
where
    P: Potential + ?Sized,
    Q: Potential + ?Sized,
    I: Fn(u64) -> Vec<f64> + Sync,
{
    cfg.validate()?;
    let mode = cfg.mode_for(n_train);
    let total = match mode {
        BaselineMode::UntilZero => cfg.restart_cap,
        BaselineMode::BestOf => cfg.restarts,
    };
    let mut kept: Vec<(BaselineSolution, Vec<f64>)> = Vec::new();
    let mut run = 0;
    while run < total {
        let end = (run + BATCH).min(total);
        let batch: Vec<(BaselineSolution, Vec<f64>)> = (run..end)
            .into_par_iter()
            .map(|r| {
                let s = derive_seed(seed, r as u64);
                let res = rmin(&init(s), train, &cfg.rmin)?;
                let e_test = test.energy(&res.w);
                let sol = BaselineSolution { restart: r, seed: s, e_train: res.energy, e_test, steps: res.trace.len() };
                Ok((sol, res.w))
            })
            .collect::<Result<_, ExperimentError>>()?;
        run = end;
        match mode {
            BaselineMode::UntilZero => {
                kept.extend(batch.into_iter().filter(|(s, _)| s.e_train < cfg.zero_energy));
                if kept.len() >= cfg.keep {
                    kept.truncate(cfg.keep);
                    let last = kept.last().unwrap().0.restart + 1;
                    let (sols, ws) = kept.into_iter().unzip();
                    return Ok((BaselineSummary::new(mode, last, sols), ws));
                }
            }
            BaselineMode::BestOf => {
                kept.extend(batch);
                kept.sort_by(|a, b| a.0.e_train.total_cmp(&b.0.e_train).then(a.0.restart.cmp(&b.0.restart)));
                kept.truncate(cfg.keep);
            }
        }
    }
    if mode == BaselineMode::UntilZero {
        return Err(ExperimentError::RestartBudgetExceeded { found: kept.len(), needed: cfg.keep, restarts: total });
    }
    let (sols, ws) = kept.into_iter().unzip();
    Ok((BaselineSummary::new(mode, total, sols), ws))
}
