//! Binary checkpoints of all replica slots.
//!
//! `b"TNCK" | version u32 | header length u64 | JSON header | n * d f64 | sha256[32]`,
//! little-endian. Random streams are counter based, so the counters in the
//! header are all that is needed to continue bit-identically.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::replica::Replica;
use super::RemdError;
use crate::fsutil::{push_f64s, seal, unseal, write_atomic, Reader};
use crate::hmc::ChainState;
use crate::potential::Potential;

const MAGIC: &[u8; 4] = b"TNCK";
const VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    sweep: usize,
    dim: usize,
    temperatures: Vec<f64>,
    dts: Vec<f64>,
    seeds: Vec<u64>,
    counters: Vec<u64>,
    identities: Vec<usize>,
    energies: Vec<f64>,
}

pub fn save_checkpoint(path: &Path, sweep: usize, replicas: &[Replica]) -> Result<(), RemdError> {
    let dim = replicas.first().map_or(0, |r| r.w().len());
    let header = Header {
        sweep,
        dim,
        temperatures: replicas.iter().map(|r| r.temperature).collect(),
        dts: replicas.iter().map(|r| r.dt).collect(),
        seeds: replicas.iter().map(|r| r.seed).collect(),
        counters: replicas.iter().map(|r| r.counter).collect(),
        identities: replicas.iter().map(|r| r.identity).collect(),
        energies: replicas.iter().map(|r| r.energy()).collect(),
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let mut buf = Vec::with_capacity(16 + json.len() + replicas.len() * dim * 8 + 32);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(json.len() as u64).to_le_bytes());
    buf.extend_from_slice(&json);
    for r in replicas {
        push_f64s(&mut buf, r.w());
    }
    seal(&mut buf);
    write_atomic(path, &buf).map_err(|source| RemdError::CheckpointIo { path: path.to_owned(), source })
}

/// Restores the replicas and the number of completed sweeps. Energies are
/// recomputed and must match the stored ones bit for bit.
pub fn load_checkpoint<P: Potential + ?Sized>(path: &Path, potential: &P) -> Result<(usize, Vec<Replica>), RemdError> {
    let bytes = std::fs::read(path).map_err(|source| RemdError::CheckpointIo { path: path.to_owned(), source })?;
    let corrupt = |reason: &str| RemdError::CorruptCheckpoint { path: path.to_owned(), reason: reason.into() };
    let body = unseal(&bytes).ok_or_else(|| corrupt("checksum mismatch"))?;
    let mut r = Reader::new(body);
    if r.take(4) != Some(MAGIC.as_slice()) {
        return Err(corrupt("bad magic"));
    }
    if r.u32() != Some(VERSION) {
        return Err(corrupt("unsupported version"));
    }
    let len = r.u64().ok_or_else(|| corrupt("truncated header"))? as usize;
    let json = r.take(len).ok_or_else(|| corrupt("truncated header"))?;
    let h: Header = serde_json::from_slice(json).map_err(|e| corrupt(&e.to_string()))?;
    let n = h.temperatures.len();
    if [h.dts.len(), h.seeds.len(), h.counters.len(), h.identities.len(), h.energies.len()]
        .iter()
        .any(|&l| l != n)
    {
        return Err(corrupt("inconsistent header"));
    }
    if h.dim != potential.dim() {
        return Err(corrupt("dimension does not match the potential"));
    }
    let mut replicas = Vec::with_capacity(n);
    for i in 0..n {
        let w = r.f64s(h.dim).ok_or_else(|| corrupt("truncated parameters"))?;
        let state = ChainState::new(potential, w)?;
        if state.energy.to_bits() != h.energies[i].to_bits() {
            return Err(corrupt("stored energy does not match the potential"));
        }
        replicas.push(Replica {
            identity: h.identities[i],
            temperature: h.temperatures[i],
            dt: h.dts[i],
            seed: h.seeds[i],
            counter: h.counters[i],
            state,
        });
    }
    if !r.is_done() {
        return Err(corrupt("trailing bytes"));
    }
    Ok((h.sweep, replicas))
}
