//! Per-temperature tables from trace files.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::remd::{measure_sweep, RunTrace};

/// Energy of a classifier that predicts 0.1 for every class.
pub fn uninformed_energy(n: usize) -> f64 {
    n as f64 * std::f64::consts::LN_10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    /// `sample`, `uninformed` or `baseline`.
    pub kind: String,
    #[serde(rename = "T")]
    pub temperature: Option<f64>,
    #[serde(rename = "E_train_mean")]
    pub e_train_mean: Option<f64>,
    #[serde(rename = "E_train_se")]
    pub e_train_se: Option<f64>,
    #[serde(rename = "E_test_mean")]
    pub e_test_mean: Option<f64>,
    #[serde(rename = "E_test_se")]
    pub e_test_se: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<ReportRow>,
    /// Index into `rows` of the temperature with the lowest mean test energy.
    pub best_test: Option<usize>,
}

impl SweepReport {
    pub fn best_temperature(&self) -> Option<f64> {
        self.best_test.and_then(|i| self.rows[i].temperature)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), ExperimentError> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Joins traces of one run written in pieces (for example across a
/// resume). Later copies of a sweep replace earlier ones.
pub fn merge_traces(traces: Vec<RunTrace>) -> Result<RunTrace, ExperimentError> {
    let mut iter = traces.into_iter();
    let mut out = iter.next().ok_or(ExperimentError::InsufficientSamples { needed: 1, got: 0 })?;
    for t in iter {
        if !t.records.is_empty() && t.temperatures != out.temperatures && !out.records.is_empty() {
            return Err(ExperimentError::InvalidConfig("traces come from different ladders".into()));
        }
        if out.records.is_empty() {
            out.temperatures = t.temperatures.clone();
        }
        out.records.extend(t.records);
    }
    // stable sort, then keep the last record of every sweep
    out.records.sort_by_key(|r| r.sweep);
    let mut dedup: Vec<crate::remd::SweepRecord> = Vec::with_capacity(out.records.len());
    for r in out.records {
        match dedup.last_mut() {
            Some(last) if last.sweep == r.sweep => *last = r,
            _ => dedup.push(r),
        }
    }
    out.records = dedup;
    Ok(out)
}

/// Averages the trace after `burn_in` sweeps and adds reference rows for
/// the uninformed classifier and, if given, the baseline test energy.
pub fn sweep_report(
    trace: &RunTrace,
    burn_in: usize,
    blocks: usize,
    n_train: Option<usize>,
    n_test: Option<usize>,
    baseline_test_energy: Option<f64>,
) -> Result<SweepReport, ExperimentError> {
    let summaries = measure_sweep(trace, burn_in, blocks).map_err(|e| match e {
        crate::remd::RemdError::InsufficientSamples { needed, got } => {
            ExperimentError::InsufficientSamples { needed, got }
        }
        other => other.into(),
    })?;
    let mut rows: Vec<ReportRow> = summaries
        .iter()
        .map(|s| ReportRow {
            kind: "sample".into(),
            temperature: Some(s.temperature),
            e_train_mean: Some(s.e_train.mean),
            e_train_se: Some(s.e_train.std_error),
            e_test_mean: s.e_test.map(|e| e.mean),
            e_test_se: s.e_test.map(|e| e.std_error),
        })
        .collect();
    let best_test = rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.e_test_mean.map(|e| (i, e)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i);
    if n_train.is_some() || n_test.is_some() {
        rows.push(ReportRow {
            kind: "uninformed".into(),
            temperature: None,
            e_train_mean: n_train.map(uninformed_energy),
            e_train_se: None,
            e_test_mean: n_test.map(uninformed_energy),
            e_test_se: None,
        });
    }
    if let Some(e) = baseline_test_energy {
        rows.push(ReportRow {
            kind: "baseline".into(),
            temperature: None,
            e_train_mean: None,
            e_train_se: None,
            e_test_mean: Some(e),
            e_test_se: None,
        });
    }
    Ok(SweepReport { rows, best_test })
}
