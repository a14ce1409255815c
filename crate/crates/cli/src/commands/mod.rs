//! The `bmnet` subcommands as library functions. Each writes its artifacts
//! under an output directory and returns the paths it wrote.

mod convergence;
mod reproduce;
mod theta;

use std::path::{Path, PathBuf};

use bmnet_core::engine::{simulate as run_engine, Snapshot};
use bmnet_core::fit::Family;
use bmnet_core::gof::{compare_families, GofReport};
use bmnet_core::rng::derive_seed;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::output::{cell, num, timed_name, write_json, Csv};
use crate::CliError;

pub use convergence::{convergence, write_convergence, DEFAULT_DTS, DEFAULT_PATHS};
pub use reproduce::{
    figure_runs, histogram_run, log_histogram, reproduce, FigureKind, FigureOptions, FigureRun, Histogram,
};
pub use theta::{theta, theta_table, ThetaRow};

/// Stream index for bootstrap seeds, kept apart from the noise streams.
pub const FIT_STREAM: u64 = 0x6669_7473;

pub const MANIFEST: &str = "manifest.json";

/// Record of a run: enough to replay it with `--config manifest.json`.
#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub command: &'a str,
    pub version: &'a str,
    pub config: ExperimentConfig,
    pub files: Vec<String>,
}

pub fn write_manifest(dir: &Path, command: &str, config: &ExperimentConfig, files: &[PathBuf]) -> Result<PathBuf, CliError> {
    let mut config = config.clone();
    config.output = None;
    let manifest = Manifest {
        command,
        version: env!("CARGO_PKG_VERSION"),
        config,
        files: files
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect(),
    };
    let path = dir.join(MANIFEST);
    write_json(&path, &manifest)?;
    Ok(path)
}

fn snapshot_csv(snap: &Snapshot) -> Csv {
    let mut csv = Csv::new(&["t", "agent", "w"]);
    for (i, w) in snap.w.iter().enumerate() {
        csv.row([num(snap.t), i.to_string(), num(*w)]);
    }
    csv
}

fn write_snapshots(dir: &Path, snaps: &[Snapshot]) -> Result<Vec<PathBuf>, CliError> {
    snaps
        .iter()
        .map(|s| {
            let path = dir.join(timed_name("snapshot", s.t, "csv"));
            snapshot_csv(s).write(&path)?;
            Ok(path)
        })
        .collect()
}

fn engine_error(e: bmnet_core::Error, dt: f64) -> CliError {
    match e {
        e @ bmnet_core::Error::Positivity { .. } => {
            CliError::Numerical(format!("{e}; dt = {dt} is too large for this noise level, try a smaller dt"))
        }
        e => e.into(),
    }
}

/// Runs the engine, turning an abort into a numerical error.
pub fn run_snapshots(config: &ExperimentConfig) -> Result<Vec<Snapshot>, CliError> {
    let sim = config.sim_config()?;
    run_engine(&sim).map_err(|abort| engine_error(abort.error, sim.dt))
}

/// Simulates and writes one `t,agent,w` CSV per snapshot plus the manifest.
/// On a positivity violation the snapshots taken before it are still written.
pub fn simulate(config: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let sim = config.sim_config()?;
    match run_engine(&sim) {
        Ok(snaps) => {
            let mut files = write_snapshots(out, &snaps)?;
            files.push(write_manifest(out, "simulate", config, &files)?);
            Ok(files)
        }
        Err(abort) => {
            write_snapshots(out, &abort.partial)?;
            Err(engine_error(abort.error, sim.dt))
        }
    }
}

/// One `(t, family)` cell of a parameter-evolution table.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionRecord {
    pub t: f64,
    pub family: Family,
    pub outcome: Result<GofReport, String>,
}

impl EvolutionRecord {
    pub fn report(&self) -> Option<&GofReport> {
        self.outcome.as_ref().ok()
    }

    pub fn gamma_hat(&self) -> Option<f64> {
        self.report().and_then(|r| r.fit.gamma())
    }

    pub fn alpha_gamma_hat(&self) -> Option<f64> {
        self.report().and_then(|r| r.fit.alpha_gamma())
    }

    pub fn p_value(&self) -> Option<f64> {
        self.report().map(|r| r.p_value)
    }
}

/// Bootstrap seed for the `k`-th fit time.
pub fn fit_seed(config: &ExperimentConfig, k: usize) -> u64 {
    derive_seed(derive_seed(config.run.seed, FIT_STREAM), k as u64)
}

/// Fits every configured family at every fit time, in config order.
pub fn evolution_records(config: &ExperimentConfig, snaps: &[Snapshot]) -> Result<Vec<EvolutionRecord>, CliError> {
    let mut records = Vec::new();
    for (k, &t) in config.fit.fit_times.iter().enumerate() {
        let snap = config
            .snapshot_index(t)
            .and_then(|i| snaps.get(i))
            .ok_or_else(|| CliError::Config(format!("fit time {t} has no snapshot")))?;
        let cmp = compare_families(&snap.w, &config.fit.families, config.fit.bootstrap_b, fit_seed(config, k));
        for &family in &config.fit.families {
            let outcome = match cmp.get(family) {
                Some(r) => Ok(r.clone()),
                None => Err(cmp
                    .failures
                    .iter()
                    .find(|f| f.family == family)
                    .map_or_else(|| "not fitted".to_string(), |f| f.error.clone())),
            };
            records.push(EvolutionRecord {
                t: snap.t,
                family,
                outcome,
            });
        }
    }
    Ok(records)
}

pub const EVOLUTION_HEADER: [&str; 16] = [
    "t",
    "family",
    "alpha",
    "beta",
    "gamma",
    "mu",
    "s",
    "gamma_hat",
    "alpha_gamma_hat",
    "loglik",
    "ks_stat",
    "p_value",
    "k",
    "B",
    "discarded",
    "converged",
];

pub fn evolution_csv(records: &[EvolutionRecord]) -> Csv {
    use bmnet_core::fit::FitParams;
    let mut csv = Csv::new(&EVOLUTION_HEADER);
    for rec in records {
        let mut row = vec![num(rec.t), rec.family.to_string()];
        match &rec.outcome {
            Ok(r) => {
                let (giga, ln) = match r.fit.params {
                    FitParams::Giga(p) => (Some(p), None),
                    FitParams::LogNormal(p) => (None, Some(p)),
                };
                row.extend([
                    cell(giga.map(|p| p.alpha)),
                    cell(giga.map(|p| p.beta)),
                    cell(giga.map(|p| p.gamma)),
                    cell(ln.map(|p| p.mu)),
                    cell(ln.map(|p| p.s)),
                    cell(rec.gamma_hat()),
                    cell(rec.alpha_gamma_hat()),
                    num(r.fit.loglik),
                    num(r.ks_stat),
                    num(r.p_value),
                    r.exceed_count.to_string(),
                    r.bootstrap_count.to_string(),
                    r.discarded_replicates.to_string(),
                    r.fit.converged.to_string(),
                ]);
            }
            Err(_) => {
                row.extend(std::iter::repeat_n(String::new(), 13));
                row.push("false".into());
            }
        }
        csv.row(row);
    }
    csv
}

/// Simulates, fits each family at every fit time and writes `evolution.csv`
/// plus the manifest. Fit failures become rows with `converged = false`.
pub fn evolve(config: &ExperimentConfig, out: &Path) -> Result<Vec<EvolutionRecord>, CliError> {
    let snaps = run_snapshots(config)?;
    let records = evolution_records(config, &snaps)?;
    let path = out.join("evolution.csv");
    evolution_csv(&records).write(&path)?;
    write_manifest(out, "evolve", config, &[path])?;
    Ok(records)
}
