use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Non-linearity applied to the output layer before the softmax.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Head {
    /// Linear output neurons; softmax over unconstrained values.
    LinearSoftmax,
    /// Logistic output neurons; softmax inputs confined to (0, 1).
    LogisticSoftmax,
}

/// Feed-forward classifier with logistic hidden layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkArch {
    pub layer_sizes: Vec<usize>,
    pub head: Head,
    /// Prior box is this many times wider than the standard init region.
    pub prior_width_factor: f64,
}

impl NetworkArch {
    pub fn new(layer_sizes: Vec<usize>, head: Head, prior_width_factor: f64) -> Result<Self, ModelError> {
        if layer_sizes.len() < 3 {
            return Err(ModelError::InvalidArch("need an input, at least one hidden and an output layer".into()));
        }
        if layer_sizes.iter().any(|&s| s == 0) {
            return Err(ModelError::InvalidArch("empty layer".into()));
        }
        if *layer_sizes.last().unwrap() < 2 {
            return Err(ModelError::InvalidArch("need at least two classes".into()));
        }
        if !(prior_width_factor > 0.0 && prior_width_factor.is_finite()) {
            return Err(ModelError::InvalidArch(format!("width factor {prior_width_factor} must be positive")));
        }
        Ok(Self { layer_sizes, head, prior_width_factor })
    }

    pub fn inputs(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn outputs(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn num_layers(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    pub fn num_params(&self) -> usize {
        self.layer_sizes.windows(2).map(|w| (w[0] + 1) * w[1]).sum()
    }

    pub fn layout(&self) -> ParamLayout {
        ParamLayout::new(&self.layer_sizes)
    }
}

/// The three networks of the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelId {
    /// 256-40-10, linear head, prior factor 50.
    M1,
    /// 256-40-40-40-10, linear head, prior factor 50.
    M3,
    /// 256-40-40-40-10, logistic head, prior factor 1000.
    M3Star,
}

impl ModelId {
    pub fn arch(self) -> NetworkArch {
        let (sizes, head, factor) = match self {
            ModelId::M1 => (vec![256, 40, 10], Head::LinearSoftmax, 50.0),
            ModelId::M3 => (vec![256, 40, 40, 40, 10], Head::LinearSoftmax, 50.0),
            ModelId::M3Star => (vec![256, 40, 40, 40, 10], Head::LogisticSoftmax, 1000.0),
        };
        NetworkArch::new(sizes, head, factor).expect("preset architectures are valid")
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelId::M1 => "M1",
            ModelId::M3 => "M3",
            ModelId::M3Star => "M3star",
        })
    }
}

impl FromStr for ModelId {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "m1" => Ok(ModelId::M1),
            "m3" => Ok(ModelId::M3),
            "m3star" | "m3*" | "m3-star" => Ok(ModelId::M3Star),
            other => Err(ModelError::InvalidArch(format!("unknown model '{other}'"))),
        }
    }
}

/// What a flat parameter index refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamSource {
    Input(usize),
    Bias,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamPosition {
    pub layer: usize,
    pub target: usize,
    pub source: ParamSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerSlice {
    pub n_in: usize,
    pub n_out: usize,
    /// Start of the `n_out x n_in` row-major weight block.
    pub weights: usize,
    /// Start of the `n_out` biases, right after the weights.
    pub biases: usize,
}

/// Flat parameter layout: per layer, the weight matrix (row per target
/// neuron) followed by the biases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamLayout {
    pub layers: Vec<LayerSlice>,
    pub len: usize,
}

impl ParamLayout {
    pub fn new(sizes: &[usize]) -> Self {
        let mut at = 0;
        let layers = sizes
            .windows(2)
            .map(|w| {
                let s = LayerSlice { n_in: w[0], n_out: w[1], weights: at, biases: at + w[0] * w[1] };
                at += (w[0] + 1) * w[1];
                s
            })
            .collect();
        Self { layers, len: at }
    }

    pub fn position(&self, index: usize) -> Option<ParamPosition> {
        let (layer, s) = self
            .layers
            .iter()
            .enumerate()
            .find(|(_, s)| index >= s.weights && index < s.biases + s.n_out)?;
        Some(if index >= s.biases {
            ParamPosition { layer, target: index - s.biases, source: ParamSource::Bias }
        } else {
            let off = index - s.weights;
            ParamPosition { layer, target: off / s.n_in, source: ParamSource::Input(off % s.n_in) }
        })
    }

    pub fn index_of(&self, pos: ParamPosition) -> usize {
        let s = &self.layers[pos.layer];
        match pos.source {
            ParamSource::Input(j) => s.weights + pos.target * s.n_in + j,
            ParamSource::Bias => s.biases + pos.target,
        }
    }

    /// Fan in (bias included) of the neuron each parameter feeds.
    pub fn fan_ins(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len);
        for s in &self.layers {
            out.extend(std::iter::repeat(s.n_in + 1).take((s.n_in + 1) * s.n_out));
        }
        out
    }
}
