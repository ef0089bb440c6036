//! MNIST ingestion, downsampling, stratified subsets and persisted snapshots.

pub mod idx;
pub mod store;
pub mod subset;
pub mod transform;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use idx::{load_mnist, parse_idx, MnistRaw, RawImageSet};
pub use store::DatasetStore;
pub use subset::{stratified_sample, stratified_split, stratified_subset, Split};
pub use transform::{transform, transform_combined, FeatureStats, PreparedMnist};

pub const NUM_CLASSES: usize = 10;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("bad IDX magic word {found:#010x} (expected {expected:#010x})")]
    BadMagic { found: u32, expected: u32 },
    #[error("truncated IDX payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("image file holds {images} images but label file holds {labels} labels")]
    CountMismatch { images: usize, labels: usize },
    #[error("label {0} outside [0, 9]")]
    LabelOutOfRange(u8),
    #[error("subset size {0} is not a multiple of 10")]
    IndivisibleSize(usize),
    #[error("class {class} has {available} examples, {requested} requested")]
    InsufficientClassCount { class: u8, available: usize, requested: usize },
    #[error("dataset shape mismatch: {0}")]
    Shape(String),
    #[error("snapshot {path} is corrupt: {reason}")]
    CorruptSnapshot { path: PathBuf, reason: String },
    #[error("missing data file {0}")]
    MissingFile(PathBuf),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl DataError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        DataError::Io { path: path.to_path_buf(), source }
    }
}

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub seed: Option<u64>,
    pub size_tag: String,
    #[serde(default)]
    pub normalization: String,
}

impl Provenance {
    pub fn new(source: impl Into<String>, seed: Option<u64>, size_tag: impl Into<String>) -> Self {
        Self {
            source: source.into(),
            seed,
            size_tag: size_tag.into(),
            normalization: String::new(),
        }
    }
}

/// Row-major input matrix with integer class labels.
///
/// `origins` carries a global example id per row (MNIST training images are
/// `0..60000`, test images `60000..70000`) so that splits can be audited.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub dim: usize,
    pub inputs: Vec<f64>,
    pub labels: Vec<u8>,
    pub origins: Vec<u32>,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn new(
        dim: usize,
        inputs: Vec<f64>,
        labels: Vec<u8>,
        origins: Vec<u32>,
        provenance: Provenance,
    ) -> Result<Self, DataError> {
        if dim == 0 || inputs.len() != dim * labels.len() {
            return Err(DataError::Shape(format!(
                "{} inputs for {} labels of dimension {dim}",
                inputs.len(),
                labels.len()
            )));
        }
        if origins.len() != labels.len() {
            return Err(DataError::Shape("origins length differs from label count".into()));
        }
        Ok(Self { dim, inputs, labels, origins, provenance })
    }

    /// Dataset without meaningful origins, mostly for synthetic data.
    pub fn from_rows(dim: usize, inputs: Vec<f64>, labels: Vec<u8>) -> Result<Self, DataError> {
        let n = labels.len() as u32;
        Self::new(dim, inputs, labels, (0..n).collect(), Provenance::new("synthetic", None, format!("n{n}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn class_counts(&self) -> [usize; NUM_CLASSES] {
        let mut c = [0; NUM_CLASSES];
        for &l in &self.labels {
            if (l as usize) < NUM_CLASSES {
                c[l as usize] += 1;
            }
        }
        c
    }

    /// Rows `indices` in the given order.
    pub fn select(&self, indices: &[usize], provenance: Provenance) -> Dataset {
        let mut inputs = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            inputs.extend_from_slice(self.row(i));
        }
        Dataset {
            dim: self.dim,
            inputs,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            origins: indices.iter().map(|&i| self.origins[i]).collect(),
            provenance,
        }
    }

    /// Contiguous row range as a new dataset.
    pub fn slice(&self, start: usize, end: usize) -> Dataset {
        let idx: Vec<usize> = (start..end).collect();
        self.select(&idx, self.provenance.clone())
    }

    /// Disjoint union (rows of `self` followed by rows of `other`).
    pub fn concat(&self, other: &Dataset, provenance: Provenance) -> Result<Dataset, DataError> {
        if self.dim != other.dim {
            return Err(DataError::Shape("cannot concatenate datasets of different dimension".into()));
        }
        let mut inputs = self.inputs.clone();
        inputs.extend_from_slice(&other.inputs);
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        let mut origins = self.origins.clone();
        origins.extend_from_slice(&other.origins);
        Dataset::new(self.dim, inputs, labels, origins, provenance)
    }
}
