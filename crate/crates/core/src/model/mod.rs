//! Classifier architectures, the uniform prior and the potential energy.

pub mod arch;
pub mod network;
pub mod prior;

use std::path::Path;

use thiserror::Error;

pub use arch::{Head, LayerSlice, ModelId, NetworkArch, ParamLayout, ParamPosition, ParamSource};
pub use network::{energy, forward, grad_energy, softmax_inputs, ClassifierPotential, EnergyGradient};
pub use prior::{in_support, init_standard, prior_box, PriorBox};

use crate::fsutil::{push_f64s, write_atomic, Reader};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid architecture: {0}")]
    InvalidArch(String),
    #[error("bad parameter file: {0}")]
    BadParamFile(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// A flat parameter vector tagged with the architecture it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    pub arch: NetworkArch,
    pub values: Vec<f64>,
}

const PARAM_MAGIC: &[u8; 4] = b"TNPV";
const PARAM_VERSION: u32 = 1;

impl ParamVector {
    pub fn new(arch: NetworkArch, values: Vec<f64>) -> Result<Self, ModelError> {
        if values.len() != arch.num_params() {
            return Err(ModelError::ShapeMismatch(format!(
                "{} values for {} parameters",
                values.len(),
                arch.num_params()
            )));
        }
        Ok(Self { arch, values })
    }

    /// `b"TNPV" | version u32 | head u8 | width f64 | layers u32 | sizes u32... | d u64 | d f64`,
    /// little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(32 + self.values.len() * 8);
        buf.extend_from_slice(PARAM_MAGIC);
        buf.extend_from_slice(&PARAM_VERSION.to_le_bytes());
        buf.push(match self.arch.head {
            Head::LinearSoftmax => 0,
            Head::LogisticSoftmax => 1,
        });
        buf.extend_from_slice(&self.arch.prior_width_factor.to_le_bytes());
        buf.extend_from_slice(&(self.arch.layer_sizes.len() as u32).to_le_bytes());
        for &s in &self.arch.layer_sizes {
            buf.extend_from_slice(&(s as u32).to_le_bytes());
        }
        buf.extend_from_slice(&(self.values.len() as u64).to_le_bytes());
        push_f64s(&mut buf, &self.values);
        buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ModelError> {
        let bad = |m: &str| ModelError::BadParamFile(m.to_string());
        let mut r = Reader::new(bytes);
        if r.take(4) != Some(PARAM_MAGIC.as_slice()) {
            return Err(bad("magic"));
        }
        if r.u32() != Some(PARAM_VERSION) {
            return Err(bad("version"));
        }
        let head = match r.u8() {
            Some(0) => Head::LinearSoftmax,
            Some(1) => Head::LogisticSoftmax,
            _ => return Err(bad("head")),
        };
        let width = r.f64().ok_or_else(|| bad("width"))?;
        let n = r.u32().ok_or_else(|| bad("layer count"))? as usize;
        let sizes = (0..n)
            .map(|_| r.u32().map(|s| s as usize))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad("sizes"))?;
        let d = r.u64().ok_or_else(|| bad("length"))? as usize;
        let values = r.f64s(d).ok_or_else(|| bad("values"))?;
        if !r.is_done() {
            return Err(bad("trailing bytes"));
        }
        Self::new(NetworkArch::new(sizes, head, width)?, values)
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        Ok(write_atomic(path, &self.to_bytes())?)
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn param_file_round_trips(values in proptest::collection::vec(-1e6f64..1e6, 26), logistic in any::<bool>()) {
            let head = if logistic { Head::LogisticSoftmax } else { Head::LinearSoftmax };
            let arch = NetworkArch::new(vec![3, 4, 2], head, 12.5).unwrap();
            let pv = ParamVector::new(arch, values).unwrap();
            prop_assert_eq!(ParamVector::from_bytes(&pv.to_bytes()).unwrap(), pv);
        }
    }

    #[test]
    fn truncated_param_file_is_rejected() {
        let pv = ParamVector::new(ModelId::M1.arch(), vec![0.5; 10690]).unwrap();
        let mut bytes = pv.to_bytes();
        bytes.pop();
        assert!(ParamVector::from_bytes(&bytes).is_err());
    }
}
