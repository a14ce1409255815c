//! Preloaded parameter sets for the five published figures.
//!
//! Figures 1 and 2 are wealth histograms at an early and a late time, with
//! every family fitted and bootstrapped. Figures 3 to 5 are parameter
//! evolutions over a sweep of network or field parameters. Each figure uses a
//! single realization per parameter set.

use std::path::{Path, PathBuf};

use bmnet_core::fit::Family;
use bmnet_core::gof::{compare_families, FamilyComparison, FamilyFailure, GofReport};
use bmnet_core::rng::derive_seed;
use serde::Serialize;

use super::{evolve, fit_seed, run_snapshots, write_manifest};
use crate::config::{
    DynamicsKind, DynamicsSection, ExperimentConfig, FitSection, InitName, ModelSection, RunSection, SchemeName,
    DEFAULT_INIT_SD, DEFAULT_J, DEFAULT_SIGMA2,
};
use crate::output::{num, timed_name, write_json, Csv};
use crate::CliError;

pub const HISTOGRAM_BINS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureKind {
    Histogram,
    Evolution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureRun {
    /// Directory name of the run, e.g. `regn_z0.01`.
    pub label: String,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureOptions {
    pub seed: u64,
    pub n_agents: usize,
    pub dt: f64,
    /// Replaces the late time of a histogram figure or the horizon of an
    /// evolution figure.
    pub t_end: Option<f64>,
    pub bootstrap_b: usize,
    /// Fit times per evolution run, evenly spaced up to the horizon.
    pub fit_points: usize,
}

impl Default for FigureOptions {
    fn default() -> Self {
        FigureOptions {
            seed: 1,
            n_agents: 1000,
            dt: 0.01,
            t_end: None,
            bootstrap_b: 99,
            fit_points: 100,
        }
    }
}

const EVOLUTION_HORIZON: f64 = 2500.0;

fn dynamics(kind: DynamicsKind, value: f64) -> DynamicsSection {
    DynamicsSection {
        kind,
        z: (kind == DynamicsKind::RegularRing).then_some(value),
        p_sw: (kind == DynamicsKind::RandomSmallWorld).then_some(value),
        gamma_eft: (kind == DynamicsKind::Eft).then_some(value),
    }
}

/// Regular networks use the order-1.5 scheme; the others use Milstein.
fn scheme_for(kind: DynamicsKind) -> SchemeName {
    if kind == DynamicsKind::RegularRing {
        SchemeName::Taylor15
    } else {
        SchemeName::Milstein
    }
}

fn label(kind: DynamicsKind, value: f64) -> String {
    match kind {
        DynamicsKind::RegularRing => format!("regn_z{value}"),
        DynamicsKind::RandomSmallWorld => format!("rann_p{value}"),
        DynamicsKind::Eft => format!("eft_g{value}"),
        DynamicsKind::Complete => "complete".into(),
        DynamicsKind::MeanField => "mean_field".into(),
    }
}

/// `step · dt`, computed as a division when `1/dt` is whole so that grid
/// times print without rounding noise.
fn grid_time(step: u64, dt: f64) -> f64 {
    let inv = (1.0 / dt).round();
    if inv > 0.0 && (inv * dt - 1.0).abs() < 1e-12 {
        step as f64 / inv
    } else {
        step as f64 * dt
    }
}

fn evolution_times(t_end: f64, dt: f64, points: usize) -> Vec<f64> {
    let total = (t_end / dt).round() as u64;
    let points = points.max(1) as u64;
    let mut steps: Vec<u64> = (1..=points).map(|k| k * total / points).filter(|&s| s > 0).collect();
    steps.dedup();
    steps.into_iter().map(|s| grid_time(s, dt)).collect()
}

fn run_config(
    kind: DynamicsKind,
    value: f64,
    times: Vec<f64>,
    seed: u64,
    opts: &FigureOptions,
) -> ExperimentConfig {
    ExperimentConfig {
        model: ModelSection {
            sigma2: DEFAULT_SIGMA2,
            j: DEFAULT_J,
        },
        dynamics: dynamics(kind, value),
        run: RunSection {
            n_agents: opts.n_agents,
            dt: opts.dt,
            t_end: *times.last().expect("at least one time"),
            snapshot_times: times.clone(),
            scheme: scheme_for(kind),
            init: InitName::Ones,
            init_sd: DEFAULT_INIT_SD,
            seed,
        },
        fit: FitSection {
            families: Family::ALL.to_vec(),
            fit_times: times,
            bootstrap_b: opts.bootstrap_b,
        },
        output: None,
    }
}

/// The runs behind figure `id`, with the published parameter sets.
pub fn figure_runs(id: u32, opts: &FigureOptions) -> Result<(FigureKind, Vec<FigureRun>), CliError> {
    let (kind, fig_kind, values, late): (DynamicsKind, FigureKind, &[f64], f64) = match id {
        1 => (DynamicsKind::RegularRing, FigureKind::Histogram, &[0.01], 2500.0),
        2 => (DynamicsKind::RandomSmallWorld, FigureKind::Histogram, &[0.003], 500.0),
        3 => (DynamicsKind::RegularRing, FigureKind::Evolution, &[0.1, 0.01, 0.003], EVOLUTION_HORIZON),
        4 => (
            DynamicsKind::RandomSmallWorld,
            FigureKind::Evolution,
            &[0.1, 0.003, 0.002, 0.001],
            EVOLUTION_HORIZON,
        ),
        5 => (DynamicsKind::Eft, FigureKind::Evolution, &[0.8, 0.6, 0.5, 0.4], EVOLUTION_HORIZON),
        other => return Err(CliError::Config(format!("unknown figure {other} (expected 1 to 5)"))),
    };
    let late = opts.t_end.unwrap_or(late);
    let times = match fig_kind {
        FigureKind::Histogram if late > 1.0 => vec![1.0, late],
        FigureKind::Histogram => vec![late],
        FigureKind::Evolution => evolution_times(late, opts.dt, opts.fit_points),
    };
    let runs = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let config = run_config(kind, v, times.clone(), derive_seed(opts.seed, i as u64), opts);
            config
                .validate()
                .map_err(|e| CliError::Config(format!("figure {id}: {e}")))?;
            Ok(FigureRun {
                label: label(kind, v),
                config,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok((fig_kind, runs))
}

/// Logarithmically spaced histogram; `edges` has one more entry than
/// `counts`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    /// Count per unit wealth, normalized by the sample size.
    pub fn density(&self, i: usize) -> f64 {
        let n: usize = self.counts.iter().sum();
        self.counts[i] as f64 / (n as f64 * (self.edges[i + 1] - self.edges[i]))
    }
}

pub fn log_histogram(w: &[f64], bins: usize) -> Result<Histogram, CliError> {
    if w.is_empty() || bins == 0 {
        return Err(CliError::Config("histogram needs samples and at least one bin".into()));
    }
    if let Some(bad) = w.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(CliError::Numerical(format!("log histogram of a non-positive value {bad}")));
    }
    let (mut lo, mut hi) = w
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if lo == hi {
        lo *= 0.9;
        hi *= 1.1;
    }
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    let h = (ln_hi - ln_lo) / bins as f64;
    let mut edges: Vec<f64> = (0..=bins).map(|i| (ln_lo + i as f64 * h).exp()).collect();
    edges[0] = lo;
    edges[bins] = hi;
    let mut counts = vec![0; bins];
    for &x in w {
        let i = ((x.ln() - ln_lo) / h).floor().max(0.0) as usize;
        counts[i.min(bins - 1)] += 1;
    }
    Ok(Histogram { edges, counts })
}

fn histogram_csv(hist: &Histogram, cmp: &FamilyComparison, families: &[Family]) -> Csv {
    let pdf_cols: Vec<String> = families.iter().map(|f| format!("pdf_{f}")).collect();
    let mut header = vec!["bin_lo", "bin_hi", "count", "density"];
    header.extend(pdf_cols.iter().map(String::as_str));
    let mut csv = Csv::new(&header);
    for i in 0..hist.counts.len() {
        let (lo, hi) = (hist.edges[i], hist.edges[i + 1]);
        let mid = (lo * hi).sqrt();
        let mut row = vec![num(lo), num(hi), hist.counts[i].to_string(), num(hist.density(i))];
        for &f in families {
            row.push(
                cmp.get(f)
                    .and_then(|r| r.fit.params.pdf(mid).ok())
                    .map(num)
                    .unwrap_or_default(),
            );
        }
        csv.row(row);
    }
    csv
}

#[derive(Serialize)]
struct GofDocument<'a> {
    t: f64,
    n: usize,
    best: Option<Family>,
    ranked: &'a [GofReport],
    failures: &'a [FamilyFailure],
}

/// Simulates, then at every fit time writes `hist_t<t>.csv` (log bins with
/// the fitted densities at bin centres) and `gof_t<t>.json` (families ranked
/// by bootstrap p-value).
pub fn histogram_run(config: &ExperimentConfig, out: &Path) -> Result<Vec<(f64, FamilyComparison)>, CliError> {
    let snaps = run_snapshots(config)?;
    let mut files = Vec::new();
    let mut results = Vec::new();
    for (k, &t) in config.fit.fit_times.iter().enumerate() {
        let snap = &snaps[config
            .snapshot_index(t)
            .ok_or_else(|| CliError::Config(format!("fit time {t} has no snapshot")))?];
        let cmp = compare_families(&snap.w, &config.fit.families, config.fit.bootstrap_b, fit_seed(config, k));
        let hist = log_histogram(&snap.w, HISTOGRAM_BINS)?;
        let hist_path = out.join(timed_name("hist", snap.t, "csv"));
        histogram_csv(&hist, &cmp, &config.fit.families).write(&hist_path)?;
        let gof_path = out.join(timed_name("gof", snap.t, "json"));
        write_json(
            &gof_path,
            &GofDocument {
                t: snap.t,
                n: snap.w.len(),
                best: cmp.best().map(|r| r.family()),
                ranked: &cmp.ranked,
                failures: &cmp.failures,
            },
        )?;
        files.extend([hist_path, gof_path]);
        results.push((snap.t, cmp));
    }
    write_manifest(out, "histogram", config, &files)?;
    Ok(results)
}

/// Runs every parameter set of figure `id` concurrently, each into
/// `out/fig<id>/<label>/`, and returns those directories.
pub fn reproduce(id: u32, opts: &FigureOptions, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let (kind, runs) = figure_runs(id, opts)?;
    let fig_dir = out.join(format!("fig{id}"));
    let results: Vec<Result<PathBuf, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = runs
            .iter()
            .map(|run| {
                let dir = fig_dir.join(&run.label);
                scope.spawn(move || {
                    match kind {
                        FigureKind::Histogram => histogram_run(&run.config, &dir).map(|_| ()),
                        FigureKind::Evolution => evolve(&run.config, &dir).map(|_| ()),
                    }
                    .map(|()| dir)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(CliError::Numerical("a figure run panicked".into()))))
            .collect()
    });
    results.into_iter().collect()
}
