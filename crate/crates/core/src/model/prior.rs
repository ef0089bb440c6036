//! Fan-in scaled uniform prior and standard initialization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::arch::NetworkArch;
use crate::stats::compensated_sum;

/// Axis-aligned box `|w_i| < sigma_i / 2` carrying the uniform prior density
/// `1 / prod_i sigma_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorBox {
    pub sigma: Vec<f64>,
    pub log_volume: f64,
}

impl PriorBox {
    pub fn new(sigma: Vec<f64>) -> Self {
        let log_volume = Self::sum_log(&sigma);
        Self { sigma, log_volume }
    }

    /// Box of full width `sigma` in every one of `dim` coordinates.
    pub fn uniform(dim: usize, sigma: f64) -> Self {
        Self::new(vec![sigma; dim])
    }

    fn sum_log(sigma: &[f64]) -> f64 {
        compensated_sum(sigma.iter().map(|s| s.ln()))
    }

    /// Recomputes `sum_i log sigma_i` with the same summation as the constructor.
    pub fn recompute_log_volume(&self) -> f64 {
        Self::sum_log(&self.sigma)
    }

    pub fn dim(&self) -> usize {
        self.sigma.len()
    }

    pub fn half_width(&self, i: usize) -> f64 {
        0.5 * self.sigma[i]
    }

    /// Strict membership test.
    pub fn contains(&self, w: &[f64]) -> bool {
        debug_assert_eq!(w.len(), self.sigma.len());
        w.iter().zip(&self.sigma).all(|(x, s)| x.abs() < 0.5 * s)
    }
}

/// `sigma_i = 2 * factor / sqrt(k_i)`: the standard init region
/// `[-1/sqrt(k), 1/sqrt(k)]` widened `factor` times.
pub fn prior_box(arch: &NetworkArch) -> PriorBox {
    let factor = arch.prior_width_factor;
    PriorBox::new(
        arch.layout()
            .fan_ins()
            .into_iter()
            .map(|k| 2.0 * factor / (k as f64).sqrt())
            .collect(),
    )
}

pub fn in_support(w: &[f64], prior: &PriorBox) -> bool {
    w.len() == prior.dim() && prior.contains(w)
}

/// Each coordinate uniform in `[-1/sqrt(k_i), 1/sqrt(k_i)]`.
pub fn init_standard(arch: &NetworkArch, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    arch.layout()
        .fan_ins()
        .into_iter()
        .map(|k| {
            let r = 1.0 / (k as f64).sqrt();
            rng.random_range(-r..=r)
        })
        .collect()
}
