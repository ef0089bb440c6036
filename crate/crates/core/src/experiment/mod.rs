//! Configuration and orchestration of complete runs: data preparation,
//! the optimization baseline, replica-exchange sweeps, evidence runs,
//! reports and the annealing stop rule.

mod anneal;
mod baseline;
mod config;
mod manifest;
mod report;
mod runs;

use std::path::PathBuf;

use thiserror::Error;

pub use anneal::{anneal_stop, cool, moving_average, AnnealPoint, AnnealStop};
pub use baseline::{baseline_optimize, BaselineConfig, BaselineMode, BaselineSolution, BaselineSummary};
pub use config::{AnnealConfig, DataConfig, ExperimentConfig, RemdParams, Seeds, TiParams, PRESETS};
pub use manifest::{OutputFile, RunManifest};
pub use report::{merge_traces, sweep_report, uninformed_energy, ReportRow, SweepReport};
pub use runs::{
    anneal_experiment, load_split, minimize_experiment, remd_experiment, ti_experiment, AnnealOutcome, RemdOutcome,
    RunSummary,
};

use crate::data::DataError;
use crate::hmc::HmcError;
use crate::minimizer::MinimizeError;
use crate::model::ModelError;
use crate::remd::RemdError;
use crate::ti::TiError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Minimize(#[from] MinimizeError),
    #[error(transparent)]
    Remd(#[from] RemdError),
    #[error(transparent)]
    Ti(#[from] TiError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("only {found} of {needed} restarts reached zero training energy within {restarts} restarts")]
    RestartBudgetExceeded { found: usize, needed: usize, restarts: usize },
    #[error("need at least {needed} samples, have {got}")]
    InsufficientSamples { needed: usize, got: usize },
}

impl ExperimentError {
    /// Process exit code: 2 for configuration and input problems, 3 for
    /// numerical failures, 4 for an exhausted budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::RestartBudgetExceeded { .. } => 4,
            Self::Minimize(_) | Self::Ti(_) => match self {
                Self::Ti(TiError::InvalidConfig(_) | TiError::GridMismatch(_) | TiError::DatasetMismatch { .. }) => 2,
                Self::Minimize(MinimizeError::InvalidConfig(_)) => 2,
                _ => 3,
            },
            Self::Remd(e) => match e {
                RemdError::Hmc(HmcError::InvalidConfig(_)) => 2,
                RemdError::Hmc(_) | RemdError::Minimize(MinimizeError::NonFiniteEnergy) => 3,
                _ => 2,
            },
            _ => 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(ExperimentError::InvalidConfig("x".into()).exit_code(), 2);
        assert_eq!(ExperimentError::Ti(TiError::EmptyOverlap { index: 0 }).exit_code(), 3);
        assert_eq!(ExperimentError::Ti(TiError::GridMismatch("x".into())).exit_code(), 2);
        assert_eq!(ExperimentError::Remd(RemdError::Hmc(HmcError::NonFiniteGradient)).exit_code(), 3);
        assert_eq!(ExperimentError::RestartBudgetExceeded { found: 1, needed: 2, restarts: 3 }.exit_code(), 4);
    }
}
