//! Run configuration: JSON files, presets and dotted-path overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::baseline::BaselineConfig;
use super::ExperimentError;
use crate::data::NUM_CLASSES;
use crate::model::ModelId;
use crate::remd::InitConfig;
use crate::ti::{FitConfig, TiConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    /// Training images, a multiple of 10.
    pub size: usize,
    /// Extra stratified training images held out for validation.
    pub validation: usize,
    /// Where prepared snapshots live.
    pub store: PathBuf,
    /// Raw IDX files; only needed the first time a split is prepared.
    pub mnist_dir: Option<PathBuf>,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self { size: 50, validation: 0, store: PathBuf::from("data/store"), mnist_dir: None }
    }
}

impl DataConfig {
    pub fn tag(&self) -> String {
        format!("D{}", self.size)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Seeds {
    pub data: u64,
    pub chains: u64,
    pub swaps: u64,
}

impl Default for Seeds {
    fn default() -> Self {
        Self { data: 1, chains: 2, swaps: 3 }
    }
}

/// Replica-exchange parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RemdParams {
    pub n_t: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub n_traj: usize,
    /// Verlet steps per trajectory.
    pub steps: usize,
    pub sweeps: usize,
    pub retune_every: usize,
    /// Sweeps discarded before averaging.
    pub burn_in: usize,
    pub blocks: usize,
    pub checkpoint_every: usize,
    pub swaps: bool,
}

impl Default for RemdParams {
    fn default() -> Self {
        Self {
            n_t: 16,
            t_min: 1e-2,
            t_max: 1e2,
            n_traj: 10,
            steps: 100,
            sweeps: 300,
            retune_every: 50,
            burn_in: 100,
            blocks: 10,
            checkpoint_every: 50,
            swaps: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TiParams {
    pub repeats: usize,
    pub fit: FitConfig,
    pub run: TiConfig,
}

impl Default for TiParams {
    fn default() -> Self {
        Self { repeats: 5, fit: FitConfig::default(), run: TiConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnealConfig {
    /// Temperatures visited, hottest first.
    pub n_t: usize,
    pub t_min: f64,
    pub t_max: f64,
    /// Trajectories at each temperature.
    pub trajectories: usize,
    /// Centered moving-average window over validation energies.
    pub window: usize,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self { n_t: 32, t_min: 1e-2, t_max: 1e2, trajectories: 20, window: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelId,
    pub data: DataConfig,
    pub seeds: Seeds,
    pub remd: RemdParams,
    pub init: InitConfig,
    pub baseline: BaselineConfig,
    pub ti: TiParams,
    pub anneal: AnnealConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelId::M3,
            data: DataConfig::default(),
            seeds: Seeds::default(),
            remd: RemdParams::default(),
            init: InitConfig::default(),
            baseline: BaselineConfig::default(),
            ti: TiParams::default(),
            anneal: AnnealConfig::default(),
        }
    }
}

pub const PRESETS: &[&str] = &["fig3-desk", "fig2-smoke", "table1", "table1-star"];

impl ExperimentConfig {
    pub fn preset(name: &str) -> Result<Self, ExperimentError> {
        let mut cfg = Self::default();
        match name {
            // N_T = 16 over [1e-2, 1e2] on D50
            "fig3-desk" => {}
            "fig2-smoke" => {
                cfg.remd = RemdParams {
                    n_t: 8,
                    n_traj: 2,
                    steps: 20,
                    sweeps: 20,
                    retune_every: 10,
                    burn_in: 4,
                    blocks: 4,
                    checkpoint_every: 10,
                    ..RemdParams::default()
                };
                cfg.init.burn_in = 10;
                cfg.init.steps = 20;
            }
            "table1" => {
                cfg.data.size = 500;
                cfg.remd.n_t = 112;
                cfg.remd.sweeps = 1000;
            }
            "table1-star" => {
                cfg.model = ModelId::M3Star;
                cfg.data.size = 500;
                cfg.remd.n_t = 84;
                cfg.remd.t_min = 10f64.powf(-1.5);
                cfg.remd.t_max = 10f64.powf(1.5);
                cfg.remd.sweeps = 1000;
            }
            other => {
                return Err(ExperimentError::InvalidConfig(format!(
                    "unknown preset '{other}' (known: {})",
                    PRESETS.join(", ")
                )))
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io { path: path.into(), source })?;
        serde_json::from_str(&text).map_err(|e| ExperimentError::InvalidConfig(format!("{}: {e}", path.display())))
    }

    /// Applies `key.path=value`. The value is parsed as JSON when possible
    /// and taken as a string otherwise.
    pub fn apply_override(&mut self, spec: &str) -> Result<(), ExperimentError> {
        let bad = |m: String| ExperimentError::InvalidConfig(m);
        let (key, raw) = spec.split_once('=').ok_or_else(|| bad(format!("override '{spec}' is not key=value")))?;
        let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut tree = serde_json::to_value(&*self).map_err(|e| bad(e.to_string()))?;
        let mut node = &mut tree;
        for part in key.split('.') {
            node = node
                .as_object_mut()
                .and_then(|m| m.get_mut(part))
                .ok_or_else(|| bad(format!("unknown config key '{key}'")))?;
        }
        *node = value;
        *self = serde_json::from_value(tree).map_err(|e| bad(format!("{key}: {e}")))?;
        Ok(())
    }

    /// Checks every field against the preconditions of the modules it feeds.
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let fail = |m: &str| Err(ExperimentError::InvalidConfig(m.to_string()));
        let d = &self.data;
        if d.size == 0 || d.size % NUM_CLASSES != 0 {
            return fail("data.size must be a positive multiple of 10");
        }
        if d.validation % NUM_CLASSES != 0 {
            return fail("data.validation must be a multiple of 10");
        }
        if d.size + d.validation > 60_000 {
            return fail("data.size + data.validation exceeds the 60000 training images");
        }
        let r = &self.remd;
        if r.n_t == 0 {
            return fail("remd.n_t must be at least 1");
        }
        if !(r.t_min > 0.0 && r.t_min.is_finite() && r.t_max.is_finite()) {
            return fail("remd temperatures must be positive and finite");
        }
        if r.n_t >= 2 && r.t_min >= r.t_max {
            return fail("remd.t_min must be below remd.t_max");
        }
        if r.n_traj == 0 || r.steps == 0 || r.sweeps == 0 {
            return fail("remd.n_traj, remd.steps and remd.sweeps must be positive");
        }
        if r.burn_in >= r.sweeps {
            return fail("remd.burn_in must leave sweeps to average");
        }
        if r.blocks < 2 || r.blocks > (r.sweeps - r.burn_in) / 2 {
            return fail("remd.blocks must be between 2 and half the retained sweeps");
        }
        if self.init.steps == 0 || !(self.init.dt0 > 0.0) {
            return fail("init.steps and init.dt0 must be positive");
        }
        if let Some(rc) = &self.init.rmin {
            rc.validate().map_err(|e| ExperimentError::InvalidConfig(format!("init.rmin: {e}")))?;
        }
        self.baseline.validate()?;
        if self.ti.repeats == 0 {
            return fail("ti.repeats must be at least 1");
        }
        if self.ti.fit.samples == 0 || self.ti.fit.steps == 0 || !(self.ti.fit.dt0 > 0.0) {
            return fail("ti.fit needs samples, steps and a positive dt0");
        }
        self.ti.run.validate().map_err(|e| ExperimentError::InvalidConfig(format!("ti.run: {e}")))?;
        let a = &self.anneal;
        if a.n_t < 2 || !(a.t_min > 0.0 && a.t_min < a.t_max) || a.trajectories == 0 {
            return fail("anneal needs n_t >= 2, 0 < t_min < t_max and trajectories > 0");
        }
        if a.window == 0 || a.window % 2 == 0 {
            return fail("anneal.window must be odd");
        }
        Ok(())
    }
}
