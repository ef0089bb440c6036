//! Tempered Bayesian sampling and evidence estimation for small feed-forward
//! MNIST classifiers.
//!
//! The pipeline: prepare standardized 16x16 MNIST subsets ([`data`]), define
//! the classifier energy and uniform prior box ([`model`]), sample
//! `exp(-E/T)` with HMC ([`hmc`]) across a temperature ladder ([`remd`]),
//! find minima with a damped-dynamics minimizer ([`minimizer`]), and compute
//! model evidence by thermodynamic integration ([`ti`]). [`experiment`] ties
//! the pieces into reproducible runs.

pub mod data;
pub mod experiment;
pub mod hmc;
pub mod minimizer;
pub mod model;
pub mod potential;
pub mod remd;
pub mod stats;
pub mod ti;

pub(crate) mod fsutil;
