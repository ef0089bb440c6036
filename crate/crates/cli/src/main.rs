//! Command-line front end: data preparation, the optimization baseline,
//! replica-exchange sweeps, evidence runs, model comparison, reports and
//! the annealing stop rule. Every command that writes files also writes a
//! manifest with the effective configuration and output checksums.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use thermonet::data::DatasetStore;
use thermonet::experiment::{
    anneal_experiment, merge_traces, minimize_experiment, remd_experiment, sweep_report, ti_experiment,
    BaselineSummary, ExperimentConfig, ExperimentError, RunManifest, RunSummary,
};
use thermonet::model::ParamVector;
use thermonet::remd::RunTrace;
use thermonet::ti::{compare, TIResult};

const MNIST_ENV: &str = "THERMONET_MNIST_DIR";
const MANIFEST_FILE: &str = "manifest.json";

#[derive(Parser)]
#[command(name = "thermonet", version, about = "Tempered posterior sampling and evidence for small MNIST classifiers")]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON configuration file; applied on top of the preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Named preset used as the starting configuration.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Override one field, e.g. `--set remd.sweeps=50`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Build (or reuse) the configured data split.
    PrepareData,
    /// Print the effective configuration as JSON.
    ShowConfig,
    /// Run the optimization baseline and store the kept minima.
    Minimize {
        #[arg(long)]
        out: PathBuf,
    },
    /// Run replica-exchange sampling, appending to `<out>/trace.csv`.
    Remd {
        #[arg(long)]
        out: PathBuf,
        /// Continue from `<out>/checkpoint.tnck` when it exists.
        #[arg(long)]
        resume: bool,
    },
    /// Evidence of the configured model around the minimum in `--w0`.
    Ti {
        /// Parameter file of the minimum.
        #[arg(long)]
        w0: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Log posterior odds of model A over model B from two evidence files.
    CompareModels {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        log_prior_ratio: f64,
        /// Also write the comparison to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-temperature energy table from trace files.
    Report {
        #[arg(long = "trace", required = true, num_args = 1..)]
        traces: Vec<PathBuf>,
        /// `summary.json` of the run, for the uninformed reference rows.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// `baseline.json` of a minimize run, for the baseline row.
        #[arg(long)]
        baseline: Option<PathBuf>,
        /// Defaults to `remd.burn_in`.
        #[arg(long)]
        burn_in: Option<usize>,
        /// Defaults to `remd.blocks`.
        #[arg(long)]
        blocks: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cool a chain and stop by validation energy.
    AnnealStop {
        #[arg(long)]
        out: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::PrepareData => "prepare-data",
            Self::ShowConfig => "show-config",
            Self::Minimize { .. } => "minimize",
            Self::Remd { .. } => "remd",
            Self::Ti { .. } => "ti",
            Self::CompareModels { .. } => "compare-models",
            Self::Report { .. } => "report",
            Self::AnnealStop { .. } => "anneal-stop",
        }
    }
}

fn effective_config(args: &ConfigArgs) -> Result<ExperimentConfig, ExperimentError> {
    let mut cfg = match &args.preset {
        Some(name) => ExperimentConfig::preset(name)?,
        None => ExperimentConfig::default(),
    };
    if let Some(path) = &args.config {
        if args.preset.is_some() {
            // file values override the preset field by field
            let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io { path: path.clone(), source })?;
            let file: Value = serde_json::from_str(&text)
                .map_err(|e| ExperimentError::InvalidConfig(format!("{}: {e}", path.display())))?;
            let mut tree = serde_json::to_value(&cfg).expect("config serializes");
            merge(&mut tree, file);
            cfg = serde_json::from_value(tree)
                .map_err(|e| ExperimentError::InvalidConfig(format!("{}: {e}", path.display())))?;
        } else {
            cfg = ExperimentConfig::load(path)?;
        }
    }
    for o in &args.overrides {
        cfg.apply_override(o)?;
    }
    if cfg.data.mnist_dir.is_none() {
        cfg.data.mnist_dir = std::env::var_os(MNIST_ENV)
            .map(PathBuf::from)
            .or_else(|| Some(PathBuf::from("data/mnist")).filter(|p| p.is_dir()));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, ExperimentError> {
    let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|e| ExperimentError::InvalidConfig(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), ExperimentError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| ExperimentError::Io { path: dir.into(), source })?;
    }
    std::fs::write(path, bytes).map_err(|source| ExperimentError::Io { path: path.into(), source })
}

/// `dir/report.csv` -> `dir/report.manifest.json`.
fn manifest_beside(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{MANIFEST_FILE}"))
}

fn finish(mut manifest: RunManifest, outputs: &[PathBuf], path: &Path) -> Result<(), ExperimentError> {
    for o in outputs {
        manifest.add_output(o)?;
    }
    manifest.finish(path)?;
    log::info!("manifest written to {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), ExperimentError> {
    let cfg = effective_config(&cli.config)?;
    let config_value = serde_json::to_value(&cfg).expect("config serializes");
    let manifest = |extra: Value| RunManifest::begin(cli.command.name(), json!({ "experiment": config_value, "args": extra }));

    match &cli.command {
        Command::ShowConfig => {
            println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        }
        Command::PrepareData => {
            let m = manifest(json!({}));
            let store = DatasetStore::new(&cfg.data.store);
            let split =
                store.get_or_prepare(cfg.data.mnist_dir.as_deref(), cfg.data.size, cfg.seeds.data, cfg.data.validation)?;
            let dir = store.split_dir(cfg.data.size, cfg.seeds.data, cfg.data.validation);
            let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
                .map_err(|source| ExperimentError::Io { path: dir.clone(), source })?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && p.file_name().is_some_and(|n| n != MANIFEST_FILE))
                .collect();
            files.sort();
            println!(
                "{}: {} train, {} test, {} validation",
                dir.display(),
                split.train.len(),
                split.test.len(),
                split.validation.as_ref().map_or(0, |v| v.len())
            );
            finish(m, &files, &dir.join(MANIFEST_FILE))?;
        }
        Command::Minimize { out } => {
            let m = manifest(json!({ "out": out }));
            let (summary, files) = minimize_experiment(&cfg, out)?;
            println!(
                "{} minima kept from {} restarts; mean test energy {:.4} +- {:.4}",
                summary.solutions.len(),
                summary.restarts_run,
                summary.mean_test_energy,
                summary.test_energy_std_error
            );
            finish(m, &files, &out.join(MANIFEST_FILE))?;
        }
        Command::Remd { out, resume } => {
            let m = manifest(json!({ "out": out, "resume": resume }));
            let outcome = remd_experiment(&cfg, out, *resume)?;
            println!("{} sweeps completed in {}", outcome.summary.sweeps_completed, out.display());
            finish(m, &outcome.files, &out.join(MANIFEST_FILE))?;
        }
        Command::Ti { w0, out } => {
            let m = manifest(json!({ "w0": w0, "out": out }));
            let w = ParamVector::load(w0)?;
            let result = ti_experiment(&cfg, &w)?;
            let path = out.join("ti.json");
            write_file(&path, &serde_json::to_vec_pretty(&result).expect("result serializes"))?;
            println!("F = {:.4} +- {:.4}, log evidence = {:.4}", result.f, result.f_std, result.log_evidence);
            finish(m, &[path], &out.join(MANIFEST_FILE))?;
        }
        Command::CompareModels { a, b, log_prior_ratio, out } => {
            let m = manifest(json!({ "a": a, "b": b, "log_prior_ratio": log_prior_ratio }));
            let ra: TIResult = read_json(a)?;
            let rb: TIResult = read_json(b)?;
            let cmp = compare(&ra, &rb, *log_prior_ratio)?;
            let text = serde_json::to_string_pretty(&cmp).expect("comparison serializes");
            println!("{text}");
            if let Some(path) = out {
                write_file(path, text.as_bytes())?;
                finish(m, &[path.clone()], &manifest_beside(path))?;
            }
        }
        Command::Report { traces, summary, baseline, burn_in, blocks, out } => {
            let m = manifest(json!({ "traces": traces, "summary": summary, "baseline": baseline, "out": out }));
            let parts = traces
                .iter()
                .map(|p| {
                    let f = std::fs::File::open(p).map_err(|source| ExperimentError::Io { path: p.clone(), source })?;
                    Ok(RunTrace::read_csv(f)?)
                })
                .collect::<Result<Vec<_>, ExperimentError>>()?;
            let trace = merge_traces(parts)?;
            let run: Option<RunSummary> = summary.as_deref().map(read_json).transpose()?;
            let base: Option<BaselineSummary> = baseline.as_deref().map(read_json).transpose()?;
            let report = sweep_report(
                &trace,
                burn_in.unwrap_or(cfg.remd.burn_in),
                blocks.unwrap_or(cfg.remd.blocks),
                run.as_ref().map(|s| s.n_train),
                run.as_ref().map(|s| s.n_test),
                base.map(|b| b.mean_test_energy),
            )?;
            let mut bytes = Vec::new();
            report.write_csv(&mut bytes)?;
            write_file(out, &bytes)?;
            match report.best_temperature() {
                Some(t) => println!("lowest mean test energy at T = {t}"),
                None => println!("trace has no test energies"),
            }
            finish(m, &[out.clone()], &manifest_beside(out))?;
        }
        Command::AnnealStop { out } => {
            let m = manifest(json!({ "out": out }));
            let (outcome, files) = anneal_experiment(&cfg, out)?;
            println!(
                "stopped at T = {} (minimum found: {}), test energy {:.4}",
                outcome.stop.temperature, outcome.stop.found_minimum, outcome.test_energy
            );
            finish(m, &files, &out.join(MANIFEST_FILE))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
