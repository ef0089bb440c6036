//! Per-trajectory CSV trace.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::sampler::TrajectoryOutcome;
use super::HmcError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub trajectory: u64,
    pub temperature: f64,
    pub accepted: bool,
    pub delta_u: f64,
    pub dt: f64,
}

impl TraceRecord {
    pub fn new(trajectory: u64, temperature: f64, dt: f64, out: &TrajectoryOutcome) -> Self {
        Self { trajectory, temperature, accepted: out.accepted, delta_u: out.delta_u(), dt }
    }
}

pub struct TraceWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> TraceWriter<W> {
    /// Writes a header row first. Use [`TraceWriter::appending`] to continue
    /// an existing stream.
    pub fn new(out: W) -> Self {
        Self { inner: csv::Writer::from_writer(out) }
    }

    pub fn appending(out: W) -> Self {
        Self { inner: csv::WriterBuilder::new().has_headers(false).from_writer(out) }
    }

    pub fn record(&mut self, rec: &TraceRecord) -> Result<(), HmcError> {
        self.inner.serialize(rec)?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<(), HmcError> {
        self.inner.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}
