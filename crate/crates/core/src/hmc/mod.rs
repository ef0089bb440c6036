//! Single-temperature Hamiltonian Monte Carlo.
//!
//! A chain samples `exp(-E(w)/T)` restricted to an optional prior box.
//! Each trajectory draws its randomness from a ChaCha stream keyed by
//! `(seed, trajectory index)`, so any trajectory can be replayed in isolation.

mod sampler;
mod stepsize;
mod trace;
mod verlet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use sampler::{hmc_trajectory, ChainState, HmcConfig, TrajectoryOutcome};
pub use stepsize::{StepSizeController, TuneReport};
pub use trace::{TraceRecord, TraceWriter};
pub use verlet::{integrate, verlet_trajectory, Masses, VerletEnd};

#[derive(Debug, Error)]
pub enum HmcError {
    #[error("non-finite gradient during propagation")]
    NonFiniteGradient,
    #[error("non-finite energy at the starting point")]
    NonFiniteEnergy,
    #[error("step size tuning did not reach the target band: dt = {dt:.3e}, acceptance = {rate:.3}")]
    FailedToTune { dt: f64, rate: f64 },
    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),
    #[error("trace output failed: {0}")]
    Trace(#[from] csv::Error),
}

/// Generator for trajectory `index` of the chain seeded with `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Mixes a tag into a seed (SplitMix64 finalizer) to get an unrelated seed
/// for an auxiliary stream such as step-size probes or swap decisions.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
