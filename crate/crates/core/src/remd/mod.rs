//! Replica-exchange HMC over a geometric temperature ladder.
//!
//! Every sweep each slot runs `N_traj` HMC trajectories at its temperature
//! (slots in parallel), then `N_T` swaps are attempted between uniformly
//! chosen adjacent slots. Swaps move parameter vectors, cached energies and
//! identity labels; tuned steps and random streams stay with the slot.

mod checkpoint;
mod ladder;
mod replica;
mod run;
mod trace;

use std::path::PathBuf;

use thiserror::Error;

pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use ladder::{make_ladder, TemperatureLadder};
pub use replica::{attempt_swap, init_replica, swap_log_acceptance, InitConfig, Replica};
pub use run::{run_remd, Remd, RemdConfig};
pub use trace::{measure_sweep, RunTrace, SlotRecord, SweepRecord, TemperatureSummary, TraceRow};

use crate::hmc::HmcError;
use crate::minimizer::MinimizeError;

#[derive(Debug, Error)]
pub enum RemdError {
    #[error("bad temperature range: {0}")]
    BadRange(String),
    #[error("invalid replica-exchange configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Hmc(#[from] HmcError),
    #[error(transparent)]
    Minimize(#[from] MinimizeError),
    #[error("checkpoint I/O on {path}: {source}")]
    CheckpointIo { path: PathBuf, source: std::io::Error },
    #[error("corrupt checkpoint {path}: {reason}")]
    CorruptCheckpoint { path: PathBuf, reason: String },
    #[error("need at least {needed} post-burn-in sweeps, have {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("trace CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
}
