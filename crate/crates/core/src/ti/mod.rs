//! Model evidence by thermodynamic integration.
//!
//! A diagonal Gaussian fitted around a minimum `w0` serves as a reference
//! whose box-truncated normalization is known in closed form. The free
//! energy difference to the target is integrated along
//! `J_lambda = (1 - lambda)(J - J0) + lambda Q + J0`, sampled sequentially
//! from `lambda = 0` to `1` with HMC inside the prior box.

mod bridge;
mod evidence;
mod quadrature;
mod reference;
mod run;
mod stiffness;

use thiserror::Error;

pub use bridge::{bridge_energy, ti_integrand, BridgePotential};
pub use evidence::{compare, evidence, Evidence, ModelComparison, TIResult};
pub use quadrature::{lambda_grid, simpson, simpson_std_error, simpson_weights};
pub use reference::{log_ndtr, log_ndtr_diff, log_z0};
pub use run::{run_ti, ti_integrand_at, ti_repeats, LambdaPoint, TiConfig, TiRun};
pub use stiffness::{fit_stiffness, FitConfig, StiffnessDiag};

use crate::hmc::HmcError;

#[derive(Debug, Error)]
pub enum TiError {
    #[error("degenerate direction {index}: sampled variance {variance:e}")]
    DegenerateDirection { index: usize, variance: f64 },
    #[error("reference Gaussian has no mass inside the box (coordinate {index})")]
    EmptyOverlap { index: usize },
    #[error("quadrature grid: {0}")]
    GridMismatch(String),
    #[error("need at least {needed} samples, have {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("models were evaluated on different datasets: {a} vs {b}")]
    DatasetMismatch { a: String, b: String },
    #[error("invalid integration configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Hmc(#[from] HmcError),
}
