//! On-disk dataset snapshots.
//!
//! Binary layout (all integers little-endian):
//!
//! ```text
//! b"TNDS" | version u32 | n u64 | dim u64 | n*dim f64 | n u8 labels | n u32 origins | sha256[32]
//! ```
//!
//! The trailing SHA-256 covers every preceding byte. A JSON sidecar with the
//! same stem records provenance and the checksum in hex.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{DataError, Dataset, Provenance, Split};
use crate::fsutil::{push_f64s, write_atomic, Reader};

const MAGIC: &[u8; 4] = b"TNDS";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SnapshotInfo {
    pub format_version: u32,
    pub rows: usize,
    pub dim: usize,
    pub sha256: String,
    pub provenance: Provenance,
}

pub fn encode_snapshot(ds: &Dataset) -> Vec<u8> {
    let mut buf = Vec::with_capacity(64 + ds.inputs.len() * 8 + ds.len() * 5);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(ds.len() as u64).to_le_bytes());
    buf.extend_from_slice(&(ds.dim as u64).to_le_bytes());
    push_f64s(&mut buf, &ds.inputs);
    buf.extend_from_slice(&ds.labels);
    for o in &ds.origins {
        buf.extend_from_slice(&o.to_le_bytes());
    }
    let digest = Sha256::digest(&buf);
    buf.extend_from_slice(&digest);
    buf
}

pub fn decode_snapshot(bytes: &[u8], provenance: Provenance, path: &Path) -> Result<Dataset, DataError> {
    let corrupt = |reason: &str| DataError::CorruptSnapshot { path: path.to_path_buf(), reason: reason.into() };
    if bytes.len() < 32 {
        return Err(corrupt("too short"));
    }
    let (body, digest) = bytes.split_at(bytes.len() - 32);
    if Sha256::digest(body).as_slice() != digest {
        return Err(corrupt("checksum mismatch"));
    }
    let mut r = Reader::new(body);
    if r.take(4) != Some(MAGIC.as_slice()) {
        return Err(corrupt("bad magic"));
    }
    if r.u32() != Some(VERSION) {
        return Err(corrupt("unsupported version"));
    }
    let n = r.u64().ok_or_else(|| corrupt("header"))? as usize;
    let dim = r.u64().ok_or_else(|| corrupt("header"))? as usize;
    let inputs = r.f64s(n * dim).ok_or_else(|| corrupt("inputs"))?;
    let labels = r.take(n).ok_or_else(|| corrupt("labels"))?.to_vec();
    let origins = (0..n)
        .map(|_| r.u32())
        .collect::<Option<Vec<u32>>>()
        .ok_or_else(|| corrupt("origins"))?;
    if !r.is_done() {
        return Err(corrupt("trailing bytes"));
    }
    Dataset::new(dim, inputs, labels, origins, provenance)
}

/// Directory of snapshots keyed by `(size, seed)` (plus validation size when
/// a validation split was carved).
#[derive(Debug, Clone)]
pub struct DatasetStore {
    root: PathBuf,
}

impl DatasetStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn split_dir(&self, size: usize, seed: u64, validation: usize) -> PathBuf {
        if validation > 0 {
            self.root.join(format!("D{size}-s{seed}-v{validation}"))
        } else {
            self.root.join(format!("D{size}-s{seed}"))
        }
    }

    pub fn save(&self, path_stem: &Path, ds: &Dataset) -> Result<SnapshotInfo, DataError> {
        let bytes = encode_snapshot(ds);
        let info = SnapshotInfo {
            format_version: VERSION,
            rows: ds.len(),
            dim: ds.dim,
            sha256: hex::encode(&bytes[bytes.len() - 32..]),
            provenance: ds.provenance.clone(),
        };
        let bin = path_stem.with_extension("bin");
        let json = path_stem.with_extension("json");
        write_atomic(&bin, &bytes).map_err(|e| DataError::io(&bin, e))?;
        let sidecar = serde_json::to_vec_pretty(&info).expect("serializable");
        write_atomic(&json, &sidecar).map_err(|e| DataError::io(&json, e))?;
        Ok(info)
    }

    pub fn load(&self, path_stem: &Path) -> Result<Dataset, DataError> {
        let bin = path_stem.with_extension("bin");
        let json = path_stem.with_extension("json");
        let info: SnapshotInfo = serde_json::from_slice(&fs::read(&json).map_err(|e| DataError::io(&json, e))?)
            .map_err(|e| DataError::CorruptSnapshot { path: json.clone(), reason: e.to_string() })?;
        let bytes = fs::read(&bin).map_err(|e| DataError::io(&bin, e))?;
        if hex::encode(&bytes[bytes.len().saturating_sub(32)..]) != info.sha256 {
            return Err(DataError::CorruptSnapshot { path: bin, reason: "sidecar checksum differs".into() });
        }
        decode_snapshot(&bytes, info.provenance, &bin)
    }

    pub fn has_split(&self, size: usize, seed: u64, validation: usize) -> bool {
        self.split_dir(size, seed, validation).join("train.bin").is_file()
    }

    pub fn save_split(&self, size: usize, seed: u64, split: &Split) -> Result<(), DataError> {
        let v = split.validation.as_ref().map_or(0, Dataset::len);
        let dir = self.split_dir(size, seed, v);
        self.save(&dir.join("train"), &split.train)?;
        self.save(&dir.join("test"), &split.test)?;
        if let Some(val) = &split.validation {
            self.save(&dir.join("validation"), val)?;
        }
        Ok(())
    }

    pub fn load_split(&self, size: usize, seed: u64, validation: usize) -> Result<Split, DataError> {
        let dir = self.split_dir(size, seed, validation);
        Ok(Split {
            train: self.load(&dir.join("train"))?,
            test: self.load(&dir.join("test"))?,
            validation: if validation > 0 { Some(self.load(&dir.join("validation"))?) } else { None },
        })
    }

    /// Loads `(size, seed)` when it was stored before, otherwise builds it
    /// from the MNIST files in `mnist_dir` and stores it. Every later call
    /// with the same key sees exactly the same images.
    pub fn get_or_prepare(
        &self,
        mnist_dir: Option<&Path>,
        size: usize,
        seed: u64,
        validation: usize,
    ) -> Result<Split, DataError> {
        if self.has_split(size, seed, validation) {
            return self.load_split(size, seed, validation);
        }
        let dir = mnist_dir.ok_or_else(|| DataError::MissingFile(self.split_dir(size, seed, validation)))?;
        let raw = super::load_mnist(dir)?;
        let prepared = super::transform_combined(&raw.train, &raw.test);
        let split = super::stratified_split(&prepared.train, &prepared.test, size, validation, seed)?;
        self.save_split(size, seed, &split)?;
        log::info!("stored D{size} (seed {seed}) under {}", self.root.display());
        Ok(split)
    }
}
