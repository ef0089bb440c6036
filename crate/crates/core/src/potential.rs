//! Energy functions sampled by the HMC, minimizer, REMD and TI drivers.
//!
//! Everything downstream of the model works against [`Potential`]: a smooth
//! scalar energy over a flat parameter vector together with its gradient.
//! The analytic toy targets here back the sampler tests and the CLI demos.

/// A differentiable energy `E(w)` in nats.
///
/// Implementations must be safe to evaluate concurrently from several chains.
pub trait Potential: Sync {
    fn dim(&self) -> usize;

    fn energy(&self, w: &[f64]) -> f64;

    /// Writes `dE/dw` into `grad` and returns `E(w)`.
    fn energy_grad(&self, w: &[f64], grad: &mut [f64]) -> f64;
}

impl<P: Potential + ?Sized> Potential for &P {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn energy(&self, w: &[f64]) -> f64 {
        (**self).energy(w)
    }
    fn energy_grad(&self, w: &[f64], grad: &mut [f64]) -> f64 {
        (**self).energy_grad(w, grad)
    }
}

/// Separable quadratic `sum_i h_i (w_i - c_i)^2 / 2 + offset`.
#[derive(Debug, Clone)]
pub struct DiagonalQuadratic {
    pub stiffness: Vec<f64>,
    pub center: Vec<f64>,
    pub offset: f64,
}

impl DiagonalQuadratic {
    pub fn isotropic(dim: usize, stiffness: f64) -> Self {
        Self {
            stiffness: vec![stiffness; dim],
            center: vec![0.0; dim],
            offset: 0.0,
        }
    }

    pub fn new(stiffness: Vec<f64>) -> Self {
        let dim = stiffness.len();
        Self {
            stiffness,
            center: vec![0.0; dim],
            offset: 0.0,
        }
    }
}

impl Potential for DiagonalQuadratic {
    fn dim(&self) -> usize {
        self.stiffness.len()
    }

    fn energy(&self, w: &[f64]) -> f64 {
        let mut e = self.offset;
        for ((x, c), h) in w.iter().zip(&self.center).zip(&self.stiffness) {
            e += 0.5 * h * (x - c) * (x - c);
        }
        e
    }

    fn energy_grad(&self, w: &[f64], grad: &mut [f64]) -> f64 {
        for (((g, x), c), h) in grad.iter_mut().zip(w).zip(&self.center).zip(&self.stiffness) {
            *g = h * (x - c);
        }
        self.energy(w)
    }
}

/// Dense quadratic `(w - c)^T A (w - c) / 2` with a symmetric positive-definite `A`.
#[derive(Debug, Clone)]
pub struct DenseQuadratic {
    pub precision: Vec<Vec<f64>>,
    pub center: Vec<f64>,
}

impl Potential for DenseQuadratic {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn energy(&self, w: &[f64]) -> f64 {
        let mut g = vec![0.0; w.len()];
        self.energy_grad(w, &mut g)
    }

    fn energy_grad(&self, w: &[f64], grad: &mut [f64]) -> f64 {
        let d: Vec<f64> = w.iter().zip(&self.center).map(|(x, c)| x - c).collect();
        let mut e = 0.0;
        for (i, row) in self.precision.iter().enumerate() {
            let ad: f64 = row.iter().zip(&d).map(|(a, x)| a * x).sum();
            grad[i] = ad;
            e += 0.5 * d[i] * ad;
        }
        e
    }
}

/// Symmetric double well `height * (w_i^2 - 1)^2` summed over coordinates.
#[derive(Debug, Clone)]
pub struct DoubleWell {
    pub dim: usize,
    pub height: f64,
}

impl Potential for DoubleWell {
    fn dim(&self) -> usize {
        self.dim
    }

    fn energy(&self, w: &[f64]) -> f64 {
        w.iter().map(|x| self.height * (x * x - 1.0).powi(2)).sum()
    }

    fn energy_grad(&self, w: &[f64], grad: &mut [f64]) -> f64 {
        for (g, x) in grad.iter_mut().zip(w) {
            *g = 4.0 * self.height * x * (x * x - 1.0);
        }
        self.energy(w)
    }
}

/// Two-dimensional anharmonic bowl
/// `a w0^2/2 + b w1^2/2 + c w0 w1 + q (w0^4 + w1^4) + offset`.
#[derive(Debug, Clone)]
pub struct QuarticBowl2d {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub q: f64,
    pub offset: f64,
}

impl Default for QuarticBowl2d {
    fn default() -> Self {
        Self {
            a: 1.0,
            b: 2.0,
            c: 0.2,
            q: 0.25,
            offset: 0.0,
        }
    }
}

impl QuarticBowl2d {
    pub fn value(&self, x: f64, y: f64) -> f64 {
        0.5 * self.a * x * x + 0.5 * self.b * y * y + self.c * x * y + self.q * (x.powi(4) + y.powi(4)) + self.offset
    }
}

impl Potential for QuarticBowl2d {
    fn dim(&self) -> usize {
        2
    }

    fn energy(&self, w: &[f64]) -> f64 {
        self.value(w[0], w[1])
    }

    fn energy_grad(&self, w: &[f64], grad: &mut [f64]) -> f64 {
        let (x, y) = (w[0], w[1]);
        grad[0] = self.a * x + self.c * y + 4.0 * self.q * x.powi(3);
        grad[1] = self.b * y + self.c * x + 4.0 * self.q * y.powi(3);
        self.value(x, y)
    }
}

/// Pure quartic `scale * sum_i w_i^4`.
#[derive(Debug, Clone)]
pub struct Quartic {
    pub dim: usize,
    pub scale: f64,
}

impl Potential for Quartic {
    fn dim(&self) -> usize {
        self.dim
    }

    fn energy(&self, w: &[f64]) -> f64 {
        w.iter().map(|x| self.scale * x.powi(4)).sum()
    }

    fn energy_grad(&self, w: &[f64], grad: &mut [f64]) -> f64 {
        for (g, x) in grad.iter_mut().zip(w) {
            *g = 4.0 * self.scale * x.powi(3);
        }
        self.energy(w)
    }
}

/// Zero energy everywhere.
#[derive(Debug, Clone)]
pub struct Flat {
    pub dim: usize,
}

impl Potential for Flat {
    fn dim(&self) -> usize {
        self.dim
    }
    fn energy(&self, _w: &[f64]) -> f64 {
        0.0
    }
    fn energy_grad(&self, _w: &[f64], grad: &mut [f64]) -> f64 {
        grad.fill(0.0);
        0.0
    }
}

/// Central finite-difference gradient, used by tests and diagnostics.
pub fn finite_difference_gradient<P: Potential + ?Sized>(p: &P, w: &[f64], step: f64) -> Vec<f64> {
    let mut x = w.to_vec();
    (0..w.len())
        .map(|i| {
            let orig = x[i];
            x[i] = orig + step;
            let up = p.energy(&x);
            x[i] = orig - step;
            let down = p.energy(&x);
            x[i] = orig;
            (up - down) / (2.0 * step)
        })
        .collect()
}
