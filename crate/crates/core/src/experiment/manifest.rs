//! Run manifests: the effective configuration, the build, and checksums of
//! every output file.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::ExperimentError;
use crate::fsutil::{sha256_file, write_atomic};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: PathBuf,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    /// Every effective setting, including seeds and CLI overrides.
    pub config: Value,
    pub started_unix: u64,
    pub finished_unix: Option<u64>,
    pub outputs: Vec<OutputFile>,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

impl RunManifest {
    pub fn begin(command: impl Into<String>, config: Value) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            started_unix: now(),
            finished_unix: None,
            outputs: Vec::new(),
        }
    }

    /// Records `path` with its current size and checksum.
    pub fn add_output(&mut self, path: &Path) -> Result<(), ExperimentError> {
        let io = |source| ExperimentError::Io { path: path.into(), source };
        let bytes = std::fs::metadata(path).map_err(io)?.len();
        let sha256 = sha256_file(path).map_err(io)?;
        self.outputs.retain(|o| o.path != path);
        self.outputs.push(OutputFile { path: path.into(), bytes, sha256 });
        Ok(())
    }

    /// Stamps the finish time and writes the manifest as JSON.
    pub fn finish(&mut self, path: &Path) -> Result<(), ExperimentError> {
        self.finished_unix = Some(now());
        let text = serde_json::to_vec_pretty(self).expect("manifest serializes");
        write_atomic(path, &text).map_err(|source| ExperimentError::Io { path: path.into(), source })
    }

    /// Paths whose current contents no longer match the recorded checksum.
    pub fn verify(&self) -> Vec<PathBuf> {
        self.outputs
            .iter()
            .filter(|o| sha256_file(&o.path).ok().as_deref() != Some(o.sha256.as_str()))
            .map(|o| o.path.clone())
            .collect()
    }
}
