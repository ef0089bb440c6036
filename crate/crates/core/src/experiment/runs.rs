//! End-to-end runs on prepared MNIST subsets. Each writes its outputs into
//! one directory.

use std::fs::{File, OpenOptions};
use std::io::BufWriter;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::anneal::{anneal_stop, cool, AnnealStop};
use super::baseline::{baseline_optimize, BaselineSummary};
use super::config::ExperimentConfig;
use super::report::merge_traces;
use super::ExperimentError;
use crate::data::{DatasetStore, Split};
use crate::fsutil::write_atomic;
use crate::hmc::{derive_seed, Masses};
use crate::minimizer::rmin;
use crate::potential::Potential;
use crate::model::{init_standard, prior_box, ClassifierPotential, ParamVector};
use crate::remd::{
    init_replica, load_checkpoint, make_ladder, save_checkpoint, Remd, RemdConfig, Replica, RunTrace,
    TemperatureLadder,
};
use crate::ti::{ti_repeats, TIResult};

pub const TRACE_FILE: &str = "trace.csv";
pub const CHECKPOINT_FILE: &str = "checkpoint.tnck";
pub const SUMMARY_FILE: &str = "summary.json";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io { path: path.into(), source }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ExperimentError> {
    let text = serde_json::to_vec_pretty(value).expect("plain data serializes");
    write_atomic(path, &text).map_err(io_err(path))
}

pub fn load_split(cfg: &ExperimentConfig) -> Result<Split, ExperimentError> {
    let store = DatasetStore::new(&cfg.data.store);
    Ok(store.get_or_prepare(cfg.data.mnist_dir.as_deref(), cfg.data.size, cfg.seeds.data, cfg.data.validation)?)
}

/// Dataset label used to refuse comparisons across different subsets.
pub fn dataset_label(cfg: &ExperimentConfig) -> String {
    format!("{}-seed{}", cfg.data.tag(), cfg.seeds.data)
}

fn ladder(t_min: f64, t_max: f64, n: usize) -> Result<TemperatureLadder, ExperimentError> {
    Ok(if n == 1 { TemperatureLadder::from_temperatures(vec![t_min])? } else { make_ladder(t_min, t_max, n)? })
}

/// Sizes and bookkeeping of a replica-exchange run, written next to its trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub model: String,
    pub dataset: String,
    pub n_train: usize,
    pub n_test: usize,
    pub sweeps_completed: usize,
    pub temperatures: Vec<f64>,
    pub final_dt: Vec<f64>,
}

pub struct RemdOutcome {
    pub trace: RunTrace,
    pub summary: RunSummary,
    pub files: Vec<PathBuf>,
}

/// Initializes (or resumes) the replicas and runs the configured sweeps,
/// appending to `out/trace.csv` after every sweep.
pub fn remd_experiment(cfg: &ExperimentConfig, out: &Path, resume: bool) -> Result<RemdOutcome, ExperimentError> {
    cfg.validate()?;
    let split = load_split(cfg)?;
    let arch = cfg.model.arch();
    let prior = prior_box(&arch);
    let train = ClassifierPotential::new(&arch, &split.train)?;
    let test = ClassifierPotential::new(&arch, &split.test)?;
    let r = &cfg.remd;
    let temps = ladder(r.t_min, r.t_max, r.n_t)?;
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    let ckpt = out.join(CHECKPOINT_FILE);
    let trace_path = out.join(TRACE_FILE);

    let (start, replicas) = if resume && ckpt.exists() {
        let (sweep, reps) = load_checkpoint(&ckpt, &train)?;
        if reps.iter().map(|x| x.temperature).collect::<Vec<_>>() != temps.temperatures() {
            return Err(ExperimentError::InvalidConfig("checkpoint ladder differs from the configuration".into()));
        }
        log::info!("resuming after sweep {sweep}");
        (sweep, reps)
    } else {
        log::info!("initializing {} replicas", temps.len());
        let reps = temps
            .temperatures()
            .par_iter()
            .enumerate()
            .map(|(i, &t)| {
                let w0 = init_standard(&arch, derive_seed(cfg.seeds.chains, i as u64));
                let seed = derive_seed(cfg.seeds.chains, 1 << 32 | i as u64);
                init_replica(&train, Some(&prior), w0, t, seed, i, &cfg.init)
            })
            .collect::<Result<Vec<Replica>, _>>()?;
        (0, reps)
    };

    let fresh_trace = start == 0 || !trace_path.exists();
    let file = if fresh_trace {
        File::create(&trace_path)
    } else {
        OpenOptions::new().append(true).open(&trace_path)
    }
    .map_err(io_err(&trace_path))?;
    let mut writer = csv::WriterBuilder::new().has_headers(fresh_trace).from_writer(BufWriter::new(file));

    let rcfg = RemdConfig {
        n_traj: r.n_traj,
        steps: r.steps,
        sweeps: r.sweeps,
        retune_every: r.retune_every,
        swap_seed: cfg.seeds.swaps,
        swaps: r.swaps,
        masses: Masses::Unit,
        controller: cfg.init.controller.clone(),
        checkpoint_every: r.checkpoint_every,
        checkpoint_path: Some(ckpt.clone()),
    };
    let mut run = Remd::new(&train, Some(&prior), Some(&test), replicas, rcfg)?.resume(start);
    let mut write_error = None;
    run.run(|rec, _| {
        let res = RunTrace::rows(rec)
            .try_for_each(|row| writer.serialize(row))
            .and_then(|_| writer.flush().map_err(csv::Error::from));
        if rec.sweep % 10 == 0 {
            log::info!("sweep {rec_sweep}: coldest E_train {e:.4}", rec_sweep = rec.sweep, e = rec.slots[0].e_train);
        }
        match res {
            Ok(()) => ControlFlow::Continue(()),
            Err(e) => {
                write_error = Some(e);
                ControlFlow::Break(())
            }
        }
    })?;
    drop(writer);
    if let Some(e) = write_error {
        return Err(e.into());
    }
    save_checkpoint(&ckpt, run.sweep, &run.replicas)?;

    let file = File::open(&trace_path).map_err(io_err(&trace_path))?;
    let trace = merge_traces(vec![RunTrace::read_csv(file)?])?;
    let summary = RunSummary {
        model: cfg.model.to_string(),
        dataset: dataset_label(cfg),
        n_train: split.train.len(),
        n_test: split.test.len(),
        sweeps_completed: run.sweep,
        temperatures: run.temperatures(),
        final_dt: run.replicas.iter().map(|x| x.dt).collect(),
    };
    let summary_path = out.join(SUMMARY_FILE);
    write_json(&summary_path, &summary)?;
    Ok(RemdOutcome { trace, summary, files: vec![trace_path, ckpt, summary_path] })
}

/// Runs the optimization baseline and stores every kept minimum as a
/// parameter file under `out/minima/`.
pub fn minimize_experiment(
    cfg: &ExperimentConfig,
    out: &Path,
) -> Result<(BaselineSummary, Vec<PathBuf>), ExperimentError> {
    cfg.validate()?;
    let split = load_split(cfg)?;
    let arch = cfg.model.arch();
    let train = ClassifierPotential::new(&arch, &split.train)?;
    let test = ClassifierPotential::new(&arch, &split.test)?;
    let (summary, minima) = baseline_optimize(
        &train,
        &test,
        |s| init_standard(&arch, s),
        split.train.len(),
        &cfg.baseline,
        cfg.seeds.chains,
    )?;
    let dir = out.join("minima");
    std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let mut files = Vec::with_capacity(minima.len() + 1);
    for (sol, w) in summary.solutions.iter().zip(minima) {
        let path = dir.join(format!("restart-{:05}.tnpv", sol.restart));
        ParamVector::new(arch.clone(), w)?.save(&path)?;
        files.push(path);
    }
    let path = out.join("baseline.json");
    write_json(&path, &summary)?;
    files.push(path);
    Ok((summary, files))
}

/// Evidence for the configured model around the minimum `w0`.
pub fn ti_experiment(cfg: &ExperimentConfig, w0: &ParamVector) -> Result<TIResult, ExperimentError> {
    cfg.validate()?;
    let arch = cfg.model.arch();
    if w0.arch != arch {
        return Err(ExperimentError::InvalidConfig(format!("w0 does not belong to model {}", cfg.model)));
    }
    let split = load_split(cfg)?;
    let prior = prior_box(&arch);
    let train = ClassifierPotential::new(&arch, &split.train)?;
    let runs = ti_repeats(&train, &w0.values, Some(&prior), &cfg.ti.fit, &cfg.ti.run, cfg.ti.repeats)?;
    for (i, (stiff, _)) in runs.iter().enumerate() {
        if let Some(frac) = stiff.outside_box_fraction.filter(|&f| f > 0.0) {
            log::warn!("repeat {i}: {:.1}% of stiffness samples left the prior box", 100.0 * frac);
        }
    }
    Ok(TIResult::from_runs(
        runs.into_iter().map(|(_, r)| r).collect(),
        &prior,
        Some(cfg.model.to_string()),
        Some(dataset_label(cfg)),
    )?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealOutcome {
    pub stop: AnnealStop,
    pub temperatures: Vec<f64>,
    pub validation_energies: Vec<f64>,
    /// Test energy of the returned parameters.
    pub test_energy: f64,
}

/// Minimizes from the standard init, cools a chain from hot to cold while
/// tracking validation energy, and stores the parameters picked by the
/// stop rule as `out/anneal-best.tnpv`.
pub fn anneal_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<(AnnealOutcome, Vec<PathBuf>), ExperimentError> {
    cfg.validate()?;
    let mut cfg = cfg.clone();
    if cfg.data.validation == 0 {
        cfg.data.validation = 1000;
    }
    let split = load_split(&cfg)?;
    let validation = split.validation.as_ref().expect("validation split requested");
    let arch = cfg.model.arch();
    let prior = prior_box(&arch);
    let train = ClassifierPotential::new(&arch, &split.train)?;
    let val = ClassifierPotential::new(&arch, validation)?;
    let test = ClassifierPotential::new(&arch, &split.test)?;
    let mut w0 = init_standard(&arch, derive_seed(cfg.seeds.chains, 0));
    if let Some(rc) = &cfg.init.rmin {
        w0 = rmin(&w0, &train, rc)?.w;
    }
    let a = &cfg.anneal;
    let mut temps = make_ladder(a.t_min, a.t_max, a.n_t)?.temperatures().to_vec();
    temps.reverse();
    let points = cool(
        &train,
        &val,
        Some(&prior),
        w0,
        &temps,
        a.trajectories,
        cfg.remd.steps,
        &cfg.init.controller,
        cfg.seeds.chains,
    )?;
    let stop = anneal_stop(&points, a.window)?;
    let best = &points[stop.index].w;
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    let w_path = out.join("anneal-best.tnpv");
    ParamVector::new(arch.clone(), best.clone())?.save(&w_path)?;
    let outcome = AnnealOutcome {
        test_energy: test.energy(best),
        stop,
        temperatures: temps,
        validation_energies: points.iter().map(|p| p.validation_energy).collect(),
    };
    let json = out.join("anneal.json");
    write_json(&json, &outcome)?;
    Ok((outcome, vec![w_path, json]))
}
