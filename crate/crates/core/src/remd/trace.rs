//! Per-sweep observables and their per-temperature summaries.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::RemdError;
use crate::stats::{blocked_mean, MeanEstimate};

/// Observables of one slot after a sweep. Swap counts refer to the pair
/// `(slot, slot + 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotRecord {
    pub temperature: f64,
    pub identity: usize,
    pub e_train: f64,
    pub e_test: Option<f64>,
    pub acceptance: f64,
    pub dt: f64,
    pub swap_attempts: u64,
    pub swap_accepts: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub sweep: usize,
    pub slots: Vec<SlotRecord>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunTrace {
    pub temperatures: Vec<f64>,
    pub records: Vec<SweepRecord>,
}

/// Long-format CSV row: one per sweep and slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub sweep: usize,
    pub slot: usize,
    pub temperature: f64,
    pub identity: usize,
    pub e_train: f64,
    pub e_test: Option<f64>,
    pub acceptance: f64,
    pub dt: f64,
    pub swap_attempts: u64,
    pub swap_accepts: u64,
}

impl RunTrace {
    pub fn new(temperatures: Vec<f64>) -> Self {
        Self { temperatures, records: Vec::new() }
    }

    pub fn rows(record: &SweepRecord) -> impl Iterator<Item = TraceRow> + '_ {
        record.slots.iter().enumerate().map(move |(slot, s)| TraceRow {
            sweep: record.sweep,
            slot,
            temperature: s.temperature,
            identity: s.identity,
            e_train: s.e_train,
            e_test: s.e_test,
            acceptance: s.acceptance,
            dt: s.dt,
            swap_attempts: s.swap_attempts,
            swap_accepts: s.swap_accepts,
        })
    }

    /// Writes the trace; `header` is false when appending to an existing file.
    pub fn write_csv<W: Write>(&self, out: W, header: bool) -> Result<(), RemdError> {
        let mut w = csv::WriterBuilder::new().has_headers(header).from_writer(out);
        for rec in &self.records {
            for row in Self::rows(rec) {
                w.serialize(row)?;
            }
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, RemdError> {
        let mut rd = csv::Reader::from_reader(input);
        let mut trace = RunTrace::default();
        for row in rd.deserialize::<TraceRow>() {
            let row = row?;
            if trace.records.last().is_none_or(|r| r.sweep != row.sweep) {
                trace.records.push(SweepRecord { sweep: row.sweep, slots: Vec::new() });
            }
            let rec = trace.records.last_mut().unwrap();
            if row.slot != rec.slots.len() {
                return Err(RemdError::MalformedTrace(format!("sweep {} slot {} out of order", row.sweep, row.slot)));
            }
            rec.slots.push(SlotRecord {
                temperature: row.temperature,
                identity: row.identity,
                e_train: row.e_train,
                e_test: row.e_test,
                acceptance: row.acceptance,
                dt: row.dt,
                swap_attempts: row.swap_attempts,
                swap_accepts: row.swap_accepts,
            });
        }
        if let Some(first) = trace.records.first() {
            trace.temperatures = first.slots.iter().map(|s| s.temperature).collect();
            if trace.records.iter().any(|r| r.slots.len() != first.slots.len()) {
                return Err(RemdError::MalformedTrace("ragged sweeps".into()));
            }
        }
        Ok(trace)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemperatureSummary {
    pub temperature: f64,
    pub e_train: MeanEstimate,
    pub e_test: Option<MeanEstimate>,
    pub acceptance: f64,
    /// Accepted fraction of swaps with the next hotter slot.
    pub swap_rate: Option<f64>,
}

/// Per-temperature means over sweeps after `burn_in`, with blocked-mean
/// standard errors from `blocks` blocks.
pub fn measure_sweep(trace: &RunTrace, burn_in: usize, blocks: usize) -> Result<Vec<TemperatureSummary>, RemdError> {
    let kept: Vec<&SweepRecord> = trace.records.iter().filter(|r| r.sweep > burn_in).collect();
    let n_slots = trace.temperatures.len();
    let mut out = Vec::with_capacity(n_slots);
    for slot in 0..n_slots {
        let train: Vec<f64> = kept.iter().map(|r| r.slots[slot].e_train).collect();
        let e_train = blocked_mean(&train, blocks)
            .ok_or(RemdError::InsufficientSamples { needed: 4, got: train.len() })?;
        let test: Option<Vec<f64>> = kept.iter().map(|r| r.slots[slot].e_test).collect();
        let e_test = match test {
            Some(t) if !t.is_empty() => blocked_mean(&t, blocks),
            _ => None,
        };
        let acceptance = kept.iter().map(|r| r.slots[slot].acceptance).sum::<f64>() / kept.len() as f64;
        let attempts: u64 = kept.iter().map(|r| r.slots[slot].swap_attempts).sum();
        let accepts: u64 = kept.iter().map(|r| r.slots[slot].swap_accepts).sum();
        out.push(TemperatureSummary {
            temperature: trace.temperatures[slot],
            e_train,
            e_test,
            acceptance,
            swap_rate: (attempts > 0).then(|| accepts as f64 / attempts as f64),
        });
    }
    Ok(out)
}
