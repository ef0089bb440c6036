//! Metropolis-corrected trajectories.

use rand::Rng;
use rand_distr::StandardNormal;

use super::verlet::{integrate, Masses};
use super::{stream_rng, HmcError};
use crate::model::PriorBox;
use crate::potential::Potential;

#[derive(Debug, Clone, PartialEq)]
pub struct HmcConfig {
    pub temperature: f64,
    pub dt: f64,
    pub steps: usize,
    pub masses: Masses,
    pub seed: u64,
    /// Each trajectory uses a step drawn uniformly from `dt * [1 - jitter, 1 + jitter]`.
    /// Zero gives the fixed-step sampler; a small jitter breaks resonances
    /// where `steps * dt` is close to a period of some mode.
    pub jitter: f64,
}

impl HmcConfig {
    pub fn new(temperature: f64, dt: f64, steps: usize, seed: u64) -> Self {
        Self { temperature, dt, steps, masses: Masses::Unit, seed, jitter: 0.0 }
    }

    pub fn validate(&self, dim: usize) -> Result<(), HmcError> {
        let bad = |m: String| Err(HmcError::InvalidConfig(m));
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return bad(format!("temperature {} must be positive", self.temperature));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("step {} must be positive", self.dt));
        }
        if self.steps == 0 {
            return bad("trajectory length must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.jitter) {
            return bad(format!("jitter {} must lie in [0, 1)", self.jitter));
        }
        if let Masses::Diagonal(m) = &self.masses {
            if m.len() != dim {
                return bad(format!("{} masses for {} coordinates", m.len(), dim));
            }
            if m.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return bad("masses must be positive".into());
            }
        }
        Ok(())
    }
}

/// Current position of a chain with its cached energy and gradient, plus
/// scratch buffers for proposals.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub w: Vec<f64>,
    pub energy: f64,
    grad: Vec<f64>,
    w_prop: Vec<f64>,
    g_prop: Vec<f64>,
    p: Vec<f64>,
}

impl ChainState {
    pub fn new<P: Potential + ?Sized>(potential: &P, w: Vec<f64>) -> Result<Self, HmcError> {
        let d = w.len();
        let mut grad = vec![0.0; d];
        let energy = potential.energy_grad(&w, &mut grad);
        if !energy.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(HmcError::NonFiniteEnergy);
        }
        Ok(Self { w, energy, grad, w_prop: vec![0.0; d], g_prop: vec![0.0; d], p: vec![0.0; d] })
    }

    /// Recomputes the cached energy and gradient, e.g. after the potential
    /// changed underneath the chain.
    pub fn refresh<P: Potential + ?Sized>(&mut self, potential: &P) -> Result<(), HmcError> {
        self.energy = potential.energy_grad(&self.w, &mut self.grad);
        if !self.energy.is_finite() {
            return Err(HmcError::NonFiniteEnergy);
        }
        Ok(())
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad
    }

    /// Exchanges position and cached energy with another chain.
    pub fn swap_contents(&mut self, other: &mut ChainState) {
        std::mem::swap(&mut self.w, &mut other.w);
        std::mem::swap(&mut self.energy, &mut other.energy);
        std::mem::swap(&mut self.grad, &mut other.grad);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryOutcome {
    pub accepted: bool,
    pub u_initial: f64,
    pub u_final: f64,
    /// `(U_initial - U_final) / T`; NaN if propagation blew up.
    pub log_accept: f64,
    pub in_support: bool,
}

impl TrajectoryOutcome {
    pub fn delta_u(&self) -> f64 {
        self.u_final - self.u_initial
    }
}

/// Runs trajectory `index` of the chain described by `cfg`, updating `state`
/// in place when the proposal is accepted. A rejected trajectory leaves
/// `state.w` and `state.energy` untouched.
pub fn hmc_trajectory<P: Potential + ?Sized>(
    potential: &P,
    state: &mut ChainState,
    prior: Option<&PriorBox>,
    cfg: &HmcConfig,
    index: u64,
) -> TrajectoryOutcome {
    let mut rng = stream_rng(cfg.seed, index);
    let t = cfg.temperature;
    for (i, pi) in state.p.iter_mut().enumerate() {
        let z: f64 = rng.sample(StandardNormal);
        *pi = z * (cfg.masses.get(i) * t).sqrt();
    }
    let log_u = rng.random::<f64>().ln();
    // drawn only when enabled so fixed-step streams are unchanged
    let dt = if cfg.jitter > 0.0 { cfg.dt * (1.0 + cfg.jitter * (2.0 * rng.random::<f64>() - 1.0)) } else { cfg.dt };
    let u_initial = state.energy + cfg.masses.kinetic(&state.p);

    state.w_prop.copy_from_slice(&state.w);
    state.g_prop.copy_from_slice(&state.grad);
    let result = integrate(
        potential,
        &mut state.w_prop,
        &mut state.p,
        &mut state.g_prop,
        dt,
        cfg.steps,
        &cfg.masses,
    );
    let Ok(e_new) = result else {
        return TrajectoryOutcome {
            accepted: false,
            u_initial,
            u_final: f64::NAN,
            log_accept: f64::NAN,
            in_support: false,
        };
    };
    let u_final = e_new + cfg.masses.kinetic(&state.p);
    let log_accept = (u_initial - u_final) / t;
    let in_support = prior.is_none_or(|b| b.contains(&state.w_prop));
    let accepted = in_support && u_final.is_finite() && log_u < log_accept;
    if accepted {
        std::mem::swap(&mut state.w, &mut state.w_prop);
        std::mem::swap(&mut state.grad, &mut state.g_prop);
        state.energy = e_new;
    }
    TrajectoryOutcome { accepted, u_initial, u_final, log_accept, in_support }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{DiagonalQuadratic, DoubleWell, Flat};
    use crate::stats::{blocked_mean, mean};

    #[test]
    fn flat_energy_always_accepts() {
        let pot = Flat { dim: 3 };
        let prior = PriorBox::uniform(3, 1e6);
        let cfg = HmcConfig::new(1.0, 0.1, 10, 1);
        let mut s = ChainState::new(&pot, vec![0.0; 3]).unwrap();
        for i in 0..200 {
            let out = hmc_trajectory(&pot, &mut s, Some(&prior), &cfg, i);
            assert!(out.accepted);
            assert!(out.log_accept.abs() < 1e-12);
        }
    }

    #[test]
    fn leaving_the_box_is_rejected_bitwise() {
        let pot = Flat { dim: 2 };
        let prior = PriorBox::uniform(2, 0.2);
        let cfg = HmcConfig::new(1.0, 1.0, 5, 9);
        let w0 = vec![0.01, -0.03];
        let mut s = ChainState::new(&pot, w0.clone()).unwrap();
        let mut rejected = 0;
        for i in 0..100 {
            let before = s.w.clone();
            let out = hmc_trajectory(&pot, &mut s, Some(&prior), &cfg, i);
            if !out.in_support {
                rejected += 1;
                assert!(!out.accepted);
                assert_eq!(
                    s.w.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
                    before.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
                );
            }
            assert!(prior.contains(&s.w));
        }
        assert!(rejected > 80);
    }

    #[test]
    fn rejection_preserves_state_bitwise() {
        let pot = DoubleWell { dim: 4, height: 3.0 };
        // a large step makes most proposals fail the Metropolis test
        let cfg = HmcConfig::new(0.5, 0.9, 10, 4);
        let mut s = ChainState::new(&pot, vec![1.0, -1.0, 0.9, 1.1]).unwrap();
        let mut seen = 0;
        for i in 0..300 {
            let (w, e) = (s.w.clone(), s.energy);
            let out = hmc_trajectory(&pot, &mut s, None, &cfg, i);
            if !out.accepted {
                seen += 1;
                assert!(w.iter().zip(&s.w).all(|(a, b)| a.to_bits() == b.to_bits()));
                assert_eq!(e.to_bits(), s.energy.to_bits());
            } else {
                assert_eq!(s.energy, pot.energy(&s.w));
            }
        }
        assert!(seen > 10);
    }

    #[test]
    fn downhill_proposals_in_support_are_accepted() {
        let pot = DoubleWell { dim: 2, height: 1.0 };
        let cfg = HmcConfig::new(1.0, 0.2, 7, 21);
        let mut s = ChainState::new(&pot, vec![0.2, -0.4]).unwrap();
        for i in 0..500 {
            let out = hmc_trajectory(&pot, &mut s, None, &cfg, i);
            if out.log_accept >= 0.0 {
                assert!(out.accepted);
            }
        }
    }

    #[test]
    fn deterministic_per_seed_and_index() {
        let pot = DoubleWell { dim: 3, height: 1.0 };
        let cfg = HmcConfig::new(0.7, 0.15, 12, 77);
        let run = || {
            let mut s = ChainState::new(&pot, vec![0.5; 3]).unwrap();
            for i in 0..50 {
                hmc_trajectory(&pot, &mut s, None, &cfg, i);
            }
            s.w
        };
        assert_eq!(run(), run());
    }

    /// 1D standard normal: moments within 3 standard errors.
    #[test]
    fn samples_standard_gaussian() {
        let pot = DiagonalQuadratic::isotropic(1, 1.0);
        let cfg = HmcConfig::new(1.0, 0.1, 20, 2024);
        let mut s = ChainState::new(&pot, vec![0.0]).unwrap();
        let n = 100_000;
        let mut xs = Vec::with_capacity(n);
        for i in 0..n as u64 {
            hmc_trajectory(&pot, &mut s, None, &cfg, i);
            xs.push(s.w[0]);
        }
        let m = blocked_mean(&xs, 50).unwrap();
        assert!(m.mean.abs() < 3.0 * m.std_error, "{m:?}");
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let v = blocked_mean(&sq, 50).unwrap();
        assert!((v.mean - 1.0).abs() < 3.0 * v.std_error, "{v:?}");
    }

    /// Covariance `T / k_i` for a diagonal quadratic at several temperatures.
    #[test]
    fn quadratic_covariance_scales_with_temperature() {
        let k = vec![1.0, 4.0, 0.25];
        let pot = DiagonalQuadratic::new(k.clone());
        for (j, t) in [0.1, 1.0, 5.0].into_iter().enumerate() {
            let cfg = HmcConfig::new(t, 0.3, 10, 100 + j as u64);
            let mut s = ChainState::new(&pot, vec![0.0; 3]).unwrap();
            let mut sq = vec![Vec::new(); 3];
            for i in 0..30_000 {
                hmc_trajectory(&pot, &mut s, None, &cfg, i);
                for (c, x) in sq.iter_mut().zip(&s.w) {
                    c.push(x * x);
                }
            }
            for (c, ki) in sq.iter().zip(&k) {
                let est = blocked_mean(c, 40).unwrap();
                assert!((est.mean - t / ki).abs() < 3.0 * est.std_error + 1e-12, "T={t} k={ki} {est:?}");
            }
        }
    }

    /// Initial momenta of consecutive trajectories are uncorrelated.
    #[test]
    fn momentum_refresh_is_independent() {
        let n = 20_000u64;
        let draws: Vec<f64> = (0..n)
            .map(|i| {
                let mut rng = stream_rng(31, i);
                rng.sample::<f64, _>(StandardNormal)
            })
            .collect();
        let m = mean(&draws);
        let var = draws.iter().map(|x| (x - m).powi(2)).sum::<f64>();
        let lag1 = draws.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum::<f64>();
        assert!((lag1 / var).abs() < 3.0 / (n as f64).sqrt());
    }

    /// Reflected 1D double well, binned: the empirical transition counts
    /// between every pair of bins are symmetric, `N_ij ~ N_ji`. With more than
    /// two bins a chain violating detailed balance could carry a net cyclic flux.
    #[test]
    fn binned_transition_flux_is_symmetric() {
        let pot = DoubleWell { dim: 1, height: 1.0 };
        let prior = PriorBox::uniform(1, 4.0);
        let cfg = HmcConfig::new(0.6, 0.25, 3, 5);
        let bins = 6usize;
        let bin = |x: f64| (((x + 2.0) / 4.0 * bins as f64) as usize).min(bins - 1);
        let mut s = ChainState::new(&pot, vec![-1.0]).unwrap();
        let mut counts = vec![vec![0f64; bins]; bins];
        let mut right = Vec::new();
        for i in 0..200_000 {
            let a = bin(s.w[0]);
            hmc_trajectory(&pot, &mut s, Some(&prior), &cfg, i);
            counts[a][bin(s.w[0])] += 1.0;
            right.push(if s.w[0] > 0.0 { 1.0 } else { 0.0 });
        }
        let mut checked = 0;
        for i in 0..bins {
            for j in i + 1..bins {
                let (a, b) = (counts[i][j], counts[j][i]);
                if a + b < 50.0 {
                    continue;
                }
                checked += 1;
                assert!((a - b).abs() < 4.0 * (a + b).sqrt(), "bins {i},{j}: {a} vs {b}");
            }
        }
        assert!(checked >= 8);
        // the symmetric well spends equal time on both sides
        let frac = blocked_mean(&right, 50).unwrap();
        assert!((frac.mean - 0.5).abs() < 3.0 * frac.std_error, "{frac:?}");
    }

    #[test]
    fn config_validation() {
        assert!(HmcConfig::new(0.0, 0.1, 1, 0).validate(1).is_err());
        assert!(HmcConfig::new(1.0, 0.0, 1, 0).validate(1).is_err());
        assert!(HmcConfig::new(1.0, 0.1, 0, 0).validate(1).is_err());
        let mut c = HmcConfig::new(1.0, 0.1, 1, 0);
        c.masses = Masses::Diagonal(vec![1.0, -1.0]);
        assert!(c.validate(2).is_err());
        c.masses = Masses::Diagonal(vec![1.0, 2.0]);
        assert!(c.validate(2).is_ok());
    }

    /// `steps * dt` equal to a full period of the harmonic oscillator: the
    /// fixed-step chain barely moves, the jittered one samples correctly.
    #[test]
    fn jitter_breaks_resonance() {
        let pot = DiagonalQuadratic::isotropic(1, 1.0);
        let steps = 20;
        let dt = 2.0 * std::f64::consts::PI / steps as f64;
        let second_moment = |jitter: f64| {
            let mut cfg = HmcConfig::new(1.0, dt, steps, 8);
            cfg.jitter = jitter;
            let mut s = ChainState::new(&pot, vec![0.3]).unwrap();
            let xs: Vec<f64> = (0..20_000)
                .map(|i| {
                    hmc_trajectory(&pot, &mut s, None, &cfg, i);
                    s.w[0] * s.w[0]
                })
                .collect();
            blocked_mean(&xs, 20).unwrap()
        };
        let fixed = second_moment(0.0);
        let jittered = second_moment(0.3);
        // resonant chain: block means scatter an order of magnitude more
        assert!(fixed.std_error > 5.0 * jittered.std_error, "{fixed:?} vs {jittered:?}");
        assert!((jittered.mean - 1.0).abs() < 3.0 * jittered.std_error, "{jittered:?}");
        assert!(jittered.std_error < 0.05);

        let mut bad = HmcConfig::new(1.0, 0.1, 5, 0);
        bad.jitter = 1.0;
        assert!(bad.validate(1).is_err());
    }
}
