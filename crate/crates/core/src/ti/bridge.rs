//! Interpolation between the target and its quadratic reference.

use super::StiffnessDiag;
use crate::potential::Potential;

/// `(1 - lambda) (J(w) - J0) + lambda sum_i k_i (w_i - w0_i)^2 / 2 + J0`.
pub struct BridgePotential<'a, P: ?Sized> {
    pub base: &'a P,
    pub stiff: &'a StiffnessDiag,
    pub lambda: f64,
}

impl<'a, P: Potential + ?Sized> BridgePotential<'a, P> {
    pub fn new(base: &'a P, stiff: &'a StiffnessDiag, lambda: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&lambda));
        Self { base, stiff, lambda }
    }

    fn combine(&self, j: f64, w: &[f64]) -> f64 {
        let l = self.lambda;
        (1.0 - l) * (j - self.stiff.j0) + l * self.stiff.quadratic(w) + self.stiff.j0
    }
}

impl<P: Potential + ?Sized> Potential for BridgePotential<'_, P> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn energy(&self, w: &[f64]) -> f64 {
        let j = if self.lambda < 1.0 { self.base.energy(w) } else { self.stiff.j0 };
        self.combine(j, w)
    }

    fn energy_grad(&self, w: &[f64], grad: &mut [f64]) -> f64 {
        let l = self.lambda;
        let j = if l < 1.0 {
            let j = self.base.energy_grad(w, grad);
            for g in grad.iter_mut() {
                *g *= 1.0 - l;
            }
            j
        } else {
            grad.fill(0.0);
            self.stiff.j0
        };
        for (((g, x), c), k) in grad.iter_mut().zip(w).zip(&self.stiff.w0).zip(&self.stiff.k) {
            *g += l * k * (x - c);
        }
        self.combine(j, w)
    }
}

/// Value and gradient of the bridge energy at `w`.
pub fn bridge_energy<P: Potential + ?Sized>(
    w: &[f64],
    lambda: f64,
    stiff: &StiffnessDiag,
    base: &P,
) -> (f64, Vec<f64>) {
    let mut g = vec![0.0; w.len()];
    let v = BridgePotential::new(base, stiff, lambda).energy_grad(w, &mut g);
    (v, g)
}

/// `dJ_bridge / dlambda = sum_i k_i (w_i - w0_i)^2 / 2 - (J(w) - J0)`.
pub fn ti_integrand(stiff: &StiffnessDiag, w: &[f64], j: f64) -> f64 {
    stiff.quadratic(w) - (j - stiff.j0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{finite_difference_gradient, QuarticBowl2d};

    fn setup() -> (QuarticBowl2d, StiffnessDiag) {
        let pot = QuarticBowl2d { offset: 1.5, ..Default::default() };
        let stiff = StiffnessDiag::new(vec![0.1, -0.2], vec![1.3, 2.7], pot.value(0.1, -0.2)).unwrap();
        (pot, stiff)
    }

    #[test]
    fn endpoints() {
        let (pot, stiff) = setup();
        let w = [0.7, 0.4];
        let (v0, _) = bridge_energy(&w, 0.0, &stiff, &pot);
        assert!((v0 - pot.energy(&w)).abs() < 1e-14);
        let (v1, _) = bridge_energy(&w, 1.0, &stiff, &pot);
        assert!((v1 - (stiff.quadratic(&w) + stiff.j0)).abs() < 1e-14);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (pot, stiff) = setup();
        let b = BridgePotential::new(&pot, &stiff, 0.37);
        for w in [[0.7, 0.4], [-1.2, 0.9], [0.0, -2.0]] {
            let (_, g) = bridge_energy(&w, 0.37, &stiff, &pot);
            let fd = finite_difference_gradient(&b, &w, 1e-5);
            for (a, f) in g.iter().zip(&fd) {
                assert!((a - f).abs() / a.abs().max(f.abs()).max(1e-3) < 1e-6, "{a} vs {f}");
            }
        }
    }

    #[test]
    fn integrand_is_the_lambda_derivative() {
        let (pot, stiff) = setup();
        let w = [0.5, 1.1];
        let h = 1e-6;
        let up = BridgePotential::new(&pot, &stiff, 0.5 + h).energy(&w);
        let down = BridgePotential::new(&pot, &stiff, 0.5 - h).energy(&w);
        let fd = (up - down) / (2.0 * h);
        assert!((fd - ti_integrand(&stiff, &w, pot.energy(&w))).abs() < 1e-7);
    }
}
