//! Evidence and model odds from free energies.

use serde::{Deserialize, Serialize};

use super::run::TiRun;
use super::TiError;
use crate::model::PriorBox;
use crate::stats::{mean, variance};

/// Free energy of a model with its prior volume, possibly averaged over
/// independent runs. Serialized as the output of an evidence calculation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TIResult {
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub dataset: Option<String>,
    /// `F = -log int_box exp(-E)`, averaged over runs.
    pub f: f64,
    /// Uncertainty of `f`: the spread over runs, or the quadrature error of a single run.
    #[serde(default)]
    pub f_std: f64,
    /// Mean reference free energy; absent for results known only by their summary.
    #[serde(default)]
    pub f0: Option<f64>,
    #[serde(default)]
    pub integral: Option<f64>,
    /// `sum_i log sigma_i`.
    pub log_volume: f64,
    /// Informational; [`evidence`] recomputes it from `f` and `log_volume`.
    #[serde(default)]
    pub log_evidence: f64,
    #[serde(default)]
    pub runs: Vec<TiRun>,
}

impl TIResult {
    pub fn from_runs(
        runs: Vec<TiRun>,
        prior: &PriorBox,
        model: Option<String>,
        dataset: Option<String>,
    ) -> Result<Self, TiError> {
        if runs.is_empty() {
            return Err(TiError::InvalidConfig("no runs".into()));
        }
        let fs: Vec<f64> = runs.iter().map(|r| r.f).collect();
        let f = mean(&fs);
        let f_std = if runs.len() > 1 { variance(&fs).sqrt() } else { runs[0].integral_std_error };
        let f0 = mean(&runs.iter().map(|r| r.f0).collect::<Vec<_>>());
        let integral = mean(&runs.iter().map(|r| r.integral).collect::<Vec<_>>());
        let log_volume = prior.log_volume;
        Ok(Self {
            model,
            dataset,
            f,
            f_std,
            f0: Some(f0),
            integral: Some(integral),
            log_volume,
            log_evidence: -f - log_volume,
            runs,
        })
    }

    /// A result given only its headline numbers.
    pub fn from_summary(f: f64, f_std: f64, log_volume: f64) -> Self {
        Self {
            model: None,
            dataset: None,
            f,
            f_std,
            f0: None,
            integral: None,
            log_volume,
            log_evidence: -f - log_volume,
            runs: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    /// `log p(t | X, M) = -F - sum_i log sigma_i`.
    pub log_evidence: f64,
    pub std_error: f64,
}

pub fn evidence(ti: &TIResult) -> Evidence {
    Evidence { log_evidence: -ti.f - ti.log_volume, std_error: ti.f_std }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub a: Evidence,
    pub b: Evidence,
    pub log_prior_ratio: f64,
    /// `log [p(M_a | data) / p(M_b | data)]`.
    pub log_odds: f64,
    pub std_error: f64,
}

/// Log posterior odds of model `a` over model `b`.
pub fn compare(a: &TIResult, b: &TIResult, log_prior_ratio: f64) -> Result<ModelComparison, TiError> {
    if let (Some(da), Some(db)) = (&a.dataset, &b.dataset) {
        if da != db {
            return Err(TiError::DatasetMismatch { a: da.clone(), b: db.clone() });
        }
    }
    let (ea, eb) = (evidence(a), evidence(b));
    Ok(ModelComparison {
        a: ea,
        b: eb,
        log_prior_ratio,
        log_odds: ea.log_evidence - eb.log_evidence + log_prior_ratio,
        std_error: ea.std_error.hypot(eb.std_error),
    })
}
