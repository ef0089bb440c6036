//! Batched forward pass, softmax cross-entropy and reverse-mode gradient.

use rayon::prelude::*;

use super::arch::{Head, NetworkArch, ParamLayout};
use super::ModelError;
use crate::data::Dataset;
use crate::potential::Potential;
use crate::stats::CompensatedSum;

const CHUNK: usize = 128;

/// `c = alpha * a * b + beta * c` on strided row-major views.
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    (rsa, csa): (usize, usize),
    b: &[f64],
    (rsb, csb): (usize, usize),
    beta: f64,
    c: &mut [f64],
) {
    if m == 0 || n == 0 {
        return;
    }
    assert!(k == 0 || a.len() > (m - 1) * rsa + (k - 1) * csa);
    assert!(k == 0 || b.len() > (k - 1) * rsb + (n - 1) * csb);
    assert!(c.len() >= m * n);
    // SAFETY: the asserts above bound every element the kernel touches.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa as isize,
            csa as isize,
            b.as_ptr(),
            rsb as isize,
            csb as isize,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

#[inline]
fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Activations of one chunk, layer by layer (`acts[0]` is the input).
struct Forward {
    acts: Vec<Vec<f64>>,
    /// Softmax inputs (after the head non-linearity).
    logits: Vec<f64>,
}

fn forward_chunk(arch: &NetworkArch, layout: &ParamLayout, w: &[f64], x: &[f64], rows: usize) -> Forward {
    let mut acts: Vec<Vec<f64>> = Vec::with_capacity(layout.layers.len());
    acts.push(x.to_vec());
    let last = layout.layers.len() - 1;
    let mut logits = Vec::new();
    for (l, s) in layout.layers.iter().enumerate() {
        let mut z = vec![0.0; rows * s.n_out];
        let weights = &w[s.weights..s.biases];
        let bias = &w[s.biases..s.biases + s.n_out];
        for row in z.chunks_exact_mut(s.n_out) {
            row.copy_from_slice(bias);
        }
        gemm(rows, s.n_in, s.n_out, &acts[l], (s.n_in, 1), weights, (1, s.n_in), 1.0, &mut z);
        if l < last {
            z.iter_mut().for_each(|v| *v = logistic(*v));
            acts.push(z);
        } else {
            if arch.head == Head::LogisticSoftmax {
                z.iter_mut().for_each(|v| *v = logistic(*v));
            }
            logits = z;
        }
    }
    Forward { acts, logits }
}

/// Per-row cross-entropy, writing `softmax - onehot` into `dlogits` when given.
fn cross_entropy(
    logits: &[f64],
    labels: &[u8],
    classes: usize,
    mut dlogits: Option<&mut [f64]>,
    acc: &mut CompensatedSum,
) {
    for (r, row) in logits.chunks_exact(classes).enumerate() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = row.iter().map(|v| (v - max).exp()).sum();
        let t = labels[r] as usize;
        let (lse, e) = if row[t] >= max {
            // near-zero energies: log1p of the other classes keeps full precision
            let rest: f64 = row.iter().enumerate().filter(|&(j, _)| j != t).map(|(_, v)| (v - row[t]).exp()).sum();
            let e = rest.ln_1p();
            (row[t] + e, e)
        } else {
            let lse = max + sum.ln();
            (lse, lse - row[t])
        };
        acc.add(e);
        if let Some(d) = dlogits.as_deref_mut() {
            let drow = &mut d[r * classes..(r + 1) * classes];
            for (dv, v) in drow.iter_mut().zip(row) {
                *dv = (v - lse).exp();
            }
            drow[t] = 0.0;
            drow[t] = -drow.iter().sum::<f64>();
        }
    }
}

fn check_shapes(arch: &NetworkArch, w: &[f64], data: &Dataset) -> Result<(), ModelError> {
    if w.len() != arch.num_params() {
        return Err(ModelError::ShapeMismatch(format!(
            "parameter vector has {} entries, architecture needs {}",
            w.len(),
            arch.num_params()
        )));
    }
    if data.dim != arch.inputs() {
        return Err(ModelError::ShapeMismatch(format!(
            "inputs have dimension {}, architecture expects {}",
            data.dim,
            arch.inputs()
        )));
    }
    if let Some(&l) = data.labels.iter().find(|&&l| l as usize >= arch.outputs()) {
        return Err(ModelError::ShapeMismatch(format!("label {l} outside {} classes", arch.outputs())));
    }
    Ok(())
}

/// Class probabilities for a single input.
pub fn forward(arch: &NetworkArch, w: &[f64], x: &[f64]) -> Result<Vec<f64>, ModelError> {
    if w.len() != arch.num_params() || x.len() != arch.inputs() {
        return Err(ModelError::ShapeMismatch("forward: input or parameter length".into()));
    }
    let f = forward_chunk(arch, &arch.layout(), w, x, 1);
    let max = f.logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = f.logits.iter().map(|v| (v - max).exp()).collect();
    let s: f64 = e.iter().sum();
    Ok(e.into_iter().map(|v| v / s).collect())
}

/// Values entering the softmax for a single input.
pub fn softmax_inputs(arch: &NetworkArch, w: &[f64], x: &[f64]) -> Result<Vec<f64>, ModelError> {
    if w.len() != arch.num_params() || x.len() != arch.inputs() {
        return Err(ModelError::ShapeMismatch("softmax_inputs: input or parameter length".into()));
    }
    Ok(forward_chunk(arch, &arch.layout(), w, x, 1).logits)
}

fn energy_unchecked(arch: &NetworkArch, layout: &ParamLayout, w: &[f64], data: &Dataset) -> f64 {
    let classes = arch.outputs();
    let partials: Vec<CompensatedSum> = (0..data.len().div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let rows = CHUNK.min(data.len() - start);
            let x = &data.inputs[start * data.dim..(start + rows) * data.dim];
            let f = forward_chunk(arch, layout, w, x, rows);
            let mut acc = CompensatedSum::new();
            cross_entropy(&f.logits, &data.labels[start..start + rows], classes, None, &mut acc);
            acc
        })
        .collect();
    // reduce in chunk order so the result does not depend on the worker count
    let mut total = CompensatedSum::new();
    for p in partials {
        total.add(p.value());
    }
    total.value()
}

fn energy_grad_unchecked(
    arch: &NetworkArch,
    layout: &ParamLayout,
    w: &[f64],
    data: &Dataset,
    grad: &mut [f64],
) -> f64 {
    grad.fill(0.0);
    let classes = arch.outputs();
    let mut total = CompensatedSum::new();
    let last = layout.layers.len() - 1;
    for start in (0..data.len()).step_by(CHUNK) {
        let rows = CHUNK.min(data.len() - start);
        let x = &data.inputs[start * data.dim..(start + rows) * data.dim];
        let f = forward_chunk(arch, layout, w, x, rows);
        let mut delta = vec![0.0; rows * classes];
        cross_entropy(&f.logits, &data.labels[start..start + rows], classes, Some(&mut delta), &mut total);
        if arch.head == Head::LogisticSoftmax {
            for (d, s) in delta.iter_mut().zip(&f.logits) {
                *d *= s * (1.0 - s);
            }
        }
        for l in (0..=last).rev() {
            let s = layout.layers[l];
            let input = &f.acts[l];
            // weight gradient: delta^T (n_out x rows) * input (rows x n_in)
            gemm(
                s.n_out,
                rows,
                s.n_in,
                &delta,
                (1, s.n_out),
                input,
                (s.n_in, 1),
                1.0,
                &mut grad[s.weights..s.biases],
            );
            let gb = &mut grad[s.biases..s.biases + s.n_out];
            for row in delta.chunks_exact(s.n_out) {
                for (g, d) in gb.iter_mut().zip(row) {
                    *g += d;
                }
            }
            if l > 0 {
                let mut back = vec![0.0; rows * s.n_in];
                gemm(rows, s.n_out, s.n_in, &delta, (s.n_out, 1), &w[s.weights..s.biases], (s.n_in, 1), 0.0, &mut back);
                for (b, a) in back.iter_mut().zip(input) {
                    *b *= a * (1.0 - a);
                }
                delta = back;
            }
        }
    }
    total.value()
}

/// Total cross-entropy `-sum_i log prob(t_i | x_i, w)` in nats.
pub fn energy(arch: &NetworkArch, w: &[f64], data: &Dataset) -> Result<f64, ModelError> {
    check_shapes(arch, w, data)?;
    if data.is_empty() {
        return Err(ModelError::ShapeMismatch("empty dataset".into()));
    }
    Ok(energy_unchecked(arch, &arch.layout(), w, data))
}

/// Energy and its exact gradient.
pub fn grad_energy(arch: &NetworkArch, w: &[f64], data: &Dataset) -> Result<EnergyGradient, ModelError> {
    check_shapes(arch, w, data)?;
    if data.is_empty() {
        return Err(ModelError::ShapeMismatch("empty dataset".into()));
    }
    let mut gradient = vec![0.0; w.len()];
    let value = energy_grad_unchecked(arch, &arch.layout(), w, data, &mut gradient);
    Ok(EnergyGradient { value, gradient })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyGradient {
    pub value: f64,
    pub gradient: Vec<f64>,
}

/// The classifier energy `E(D|w)` over a fixed dataset as a [`Potential`].
#[derive(Debug, Clone)]
pub struct ClassifierPotential<'a> {
    arch: NetworkArch,
    layout: ParamLayout,
    data: &'a Dataset,
}

impl<'a> ClassifierPotential<'a> {
    pub fn new(arch: &NetworkArch, data: &'a Dataset) -> Result<Self, ModelError> {
        check_shapes(arch, &vec![0.0; arch.num_params()], data)?;
        if data.is_empty() {
            return Err(ModelError::ShapeMismatch("empty dataset".into()));
        }
        Ok(Self { arch: arch.clone(), layout: arch.layout(), data })
    }

    pub fn arch(&self) -> &NetworkArch {
        &self.arch
    }

    pub fn data(&self) -> &Dataset {
        self.data
    }
}

impl Potential for ClassifierPotential<'_> {
    fn dim(&self) -> usize {
        self.layout.len
    }

    fn energy(&self, w: &[f64]) -> f64 {
        energy_unchecked(&self.arch, &self.layout, w, self.data)
    }

    fn energy_grad(&self, w: &[f64], grad: &mut [f64]) -> f64 {
        energy_grad_unchecked(&self.arch, &self.layout, w, self.data, grad)
    }
}
