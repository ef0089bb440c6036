//! Velocity Verlet (kick-drift-kick) propagation.

use super::HmcError;
use crate::potential::Potential;

/// Diagonal mass matrix.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Masses {
    #[default]
    Unit,
    Diagonal(Vec<f64>),
}

impl Masses {
    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        match self {
            Masses::Unit => 1.0,
            Masses::Diagonal(m) => m[i],
        }
    }

    /// `m_i = k_i`, the fan in of the neuron parameter `i` feeds.
    pub fn fan_in(fan_ins: &[usize]) -> Self {
        Masses::Diagonal(fan_ins.iter().map(|&k| k as f64).collect())
    }

    pub fn kinetic(&self, p: &[f64]) -> f64 {
        match self {
            Masses::Unit => 0.5 * p.iter().map(|x| x * x).sum::<f64>(),
            Masses::Diagonal(m) => 0.5 * p.iter().zip(m).map(|(x, m)| x * x / m).sum::<f64>(),
        }
    }
}

/// Propagates `(w, p)` in place for `steps` steps of length `dt`.
///
/// `grad` must hold `dE/dw` at the incoming `w` and is left holding the
/// gradient at the final `w`. Returns the energy at the final position.
pub fn integrate<P: Potential + ?Sized>(
    potential: &P,
    w: &mut [f64],
    p: &mut [f64],
    grad: &mut [f64],
    dt: f64,
    steps: usize,
    masses: &Masses,
) -> Result<f64, HmcError> {
    let half = 0.5 * dt;
    let mut energy = f64::NAN;
    for _ in 0..steps {
        for (pi, gi) in p.iter_mut().zip(grad.iter()) {
            *pi -= half * gi;
        }
        match masses {
            Masses::Unit => {
                for (wi, pi) in w.iter_mut().zip(p.iter()) {
                    *wi += dt * pi;
                }
            }
            Masses::Diagonal(m) => {
                for ((wi, pi), mi) in w.iter_mut().zip(p.iter()).zip(m) {
                    *wi += dt * pi / mi;
                }
            }
        }
        energy = potential.energy_grad(w, grad);
        if !energy.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(HmcError::NonFiniteGradient);
        }
        for (pi, gi) in p.iter_mut().zip(grad.iter()) {
            *pi -= half * gi;
        }
    }
    if steps == 0 {
        energy = potential.energy(w);
    }
    Ok(energy)
}

/// End point of a Verlet trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct VerletEnd {
    pub w: Vec<f64>,
    pub p: Vec<f64>,
    pub energy: f64,
}

/// Allocating wrapper around [`integrate`].
pub fn verlet_trajectory<P: Potential + ?Sized>(
    potential: &P,
    w: &[f64],
    p: &[f64],
    dt: f64,
    steps: usize,
    masses: &Masses,
) -> Result<VerletEnd, HmcError> {
    let mut w = w.to_vec();
    let mut p = p.to_vec();
    let mut grad = vec![0.0; w.len()];
    let e0 = potential.energy_grad(&w, &mut grad);
    if !e0.is_finite() || grad.iter().any(|g| !g.is_finite()) {
        return Err(HmcError::NonFiniteGradient);
    }
    let energy = integrate(potential, &mut w, &mut p, &mut grad, dt, steps, masses)?;
    Ok(VerletEnd { w, p, energy })
}
