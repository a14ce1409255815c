//! Experiment configuration: TOML parsing with line-anchored diagnostics,
//! validation, and conversion into an engine [`SimConfig`].
//!
//! Two entry points produce the same [`ExperimentConfig`]: a TOML file, and a
//! `manifest.json` written by a previous run (its `config` object), which
//! makes any run replayable.

use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use bmnet_core::engine::{Dynamics, InitialCondition, ModelParams, Scheme, SimConfig};
use bmnet_core::fit::Family;
use bmnet_core::nettop::{build_complete, build_random_smallworld, build_regular_ring, NetworkTopology};
use bmnet_core::rng::derive_seed;
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::CliError;

/// Stream index used to derive the random-network seed from the run seed, so
/// the graph and the noise never share a stream.
pub const TOPOLOGY_STREAM: u64 = 0x746f_706f;

pub const DEFAULT_SIGMA2: f64 = 0.05;
pub const DEFAULT_J: f64 = 0.1;
pub const DEFAULT_N: usize = 1000;
pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_INIT_SD: f64 = 0.05;
pub const DEFAULT_BOOTSTRAP_B: usize = 99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DynamicsKind {
    Complete,
    RegularRing,
    RandomSmallWorld,
    MeanField,
    Eft,
}

impl DynamicsKind {
    pub fn is_network(self) -> bool {
        matches!(self, DynamicsKind::Complete | DynamicsKind::RegularRing | DynamicsKind::RandomSmallWorld)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    Milstein,
    Taylor15,
}

impl From<SchemeName> for Scheme {
    fn from(s: SchemeName) -> Scheme {
        match s {
            SchemeName::Milstein => Scheme::Milstein,
            SchemeName::Taylor15 => Scheme::Taylor15,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitName {
    Ones,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub sigma2: f64,
    #[serde(rename = "J")]
    pub j: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSection {
    pub kind: DynamicsKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_sw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_eft: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(rename = "N")]
    pub n_agents: usize,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
    pub scheme: SchemeName,
    pub init: InitName,
    pub init_sd: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub families: Vec<Family>,
    pub fit_times: Vec<f64>,
    #[serde(rename = "bootstrap_B")]
    pub bootstrap_b: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

/// Fully resolved experiment: every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSection,
    pub dynamics: DynamicsSection,
    pub run: RunSection,
    pub fit: FitSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

/// A config key, used to anchor validation messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Sigma2,
    J,
    Kind,
    Z,
    PSw,
    GammaEft,
    N,
    Dt,
    TEnd,
    SnapshotTimes,
    InitSd,
    Families,
    FitTimes,
    BootstrapB,
}

impl Field {
    pub fn key(self) -> &'static str {
        match self {
            Field::Sigma2 => "model.sigma2",
            Field::J => "model.J",
            Field::Kind => "dynamics.kind",
            Field::Z => "dynamics.z",
            Field::PSw => "dynamics.p_sw",
            Field::GammaEft => "dynamics.gamma_eft",
            Field::N => "run.N",
            Field::Dt => "run.dt",
            Field::TEnd => "run.t_end",
            Field::SnapshotTimes => "run.snapshot_times",
            Field::InitSd => "run.init_sd",
            Field::Families => "fit.families",
            Field::FitTimes => "fit.fit_times",
            Field::BootstrapB => "fit.bootstrap_B",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub field: Field,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field.key(), self.message)
    }
}

fn issue<T>(field: Field, message: impl Into<String>) -> Result<T, ConfigIssue> {
    Err(ConfigIssue {
        field,
        message: message.into(),
    })
}

fn on_grid(t: f64, dt: f64) -> bool {
    let k = (t / dt).round();
    (k * dt - t).abs() <= 1e-9 * t.abs().max(1.0)
}

fn same_time(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(1.0)
}

fn positive(field: Field, name: &str, x: f64) -> Result<(), ConfigIssue> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        issue(field, format!("{name} must be positive and finite, got {x}"))
    }
}

impl ExperimentConfig {
    /// Neighbour count `n = zN` of a regular ring, if it is a whole number.
    pub fn ring_neighbours(&self) -> Option<usize> {
        let z = self.dynamics.z?;
        let n = z * self.run.n_agents as f64;
        let rounded = n.round();
        ((n - rounded).abs() <= 1e-9 * rounded.max(1.0) && rounded >= 1.0).then_some(rounded as usize)
    }

    pub fn validate(&self) -> Result<(), ConfigIssue> {
        positive(Field::Sigma2, "sigma2", self.model.sigma2)?;
        if !(self.model.j >= 0.0 && self.model.j.is_finite()) {
            return issue(Field::J, format!("J must be non-negative and finite, got {}", self.model.j));
        }
        self.validate_dynamics()?;
        self.validate_run()?;
        self.validate_fit()
    }

    fn validate_dynamics(&self) -> Result<(), ConfigIssue> {
        let kind = self.dynamics.kind;
        let big_n = self.run.n_agents;
        let stray = |field: Field, present: bool, wanted: DynamicsKind, name: &str| {
            if present && kind != wanted {
                let owner = serde_json::to_value(wanted).expect("unit enum serializes");
                issue(field, format!("{name} only applies to kind = {owner}"))
            } else {
                Ok(())
            }
        };
        stray(Field::Z, self.dynamics.z.is_some(), DynamicsKind::RegularRing, "z")?;
        stray(Field::PSw, self.dynamics.p_sw.is_some(), DynamicsKind::RandomSmallWorld, "p_sw")?;
        stray(Field::GammaEft, self.dynamics.gamma_eft.is_some(), DynamicsKind::Eft, "gamma_eft")?;
        if kind.is_network() && big_n < 2 {
            return issue(Field::N, format!("a network needs at least 2 agents, got {big_n}"));
        }
        match kind {
            DynamicsKind::RegularRing => {
                let Some(z) = self.dynamics.z else {
                    return issue(Field::Kind, "regular_ring requires z");
                };
                if !(z > 0.0 && z < 1.0) {
                    return issue(Field::Z, format!("z must lie in (0, 1), got {z}"));
                }
                let Some(n) = self.ring_neighbours() else {
                    return issue(
                        Field::Z,
                        format!("n = z*N = {} must be a whole number of neighbours", z * big_n as f64),
                    );
                };
                if n > big_n - 1 {
                    return issue(Field::Z, format!("n = z*N = {n} exceeds N - 1 = {}", big_n - 1));
                }
                if n % 2 == 1 && big_n % 2 == 1 {
                    return issue(Field::Z, format!("odd n = {n} needs an even N, got {big_n}"));
                }
            }
            DynamicsKind::RandomSmallWorld => {
                let Some(p) = self.dynamics.p_sw else {
                    return issue(Field::Kind, "random_small_world requires p_sw");
                };
                if !(p > 0.0 && p <= 1.0) {
                    return issue(Field::PSw, format!("p_sw must lie in (0, 1], got {p}"));
                }
            }
            DynamicsKind::Eft => {
                let Some(g) = self.dynamics.gamma_eft else {
                    return issue(Field::Kind, "eft requires gamma_eft");
                };
                if !(g > 0.0 && g <= 1.0) {
                    return issue(Field::GammaEft, format!("gamma_eft must lie in (0, 1], got {g}"));
                }
            }
            DynamicsKind::Complete | DynamicsKind::MeanField => {}
        }
        Ok(())
    }

    fn validate_run(&self) -> Result<(), ConfigIssue> {
        let run = &self.run;
        if run.n_agents == 0 {
            return issue(Field::N, "N must be at least 1");
        }
        positive(Field::Dt, "dt", run.dt)?;
        positive(Field::TEnd, "t_end", run.t_end)?;
        if !on_grid(run.t_end, run.dt) {
            return issue(Field::TEnd, format!("t_end = {} is not a multiple of dt = {}", run.t_end, run.dt));
        }
        if run.snapshot_times.is_empty() {
            return issue(Field::SnapshotTimes, "at least one snapshot time is required");
        }
        let mut prev = f64::NEG_INFINITY;
        for &t in &run.snapshot_times {
            if !(t >= 0.0 && t <= run.t_end) {
                return issue(Field::SnapshotTimes, format!("time {t} lies outside [0, {}]", run.t_end));
            }
            if !on_grid(t, run.dt) {
                return issue(Field::SnapshotTimes, format!("time {t} is not a multiple of dt = {}", run.dt));
            }
            if t <= prev {
                return issue(Field::SnapshotTimes, "times must be strictly increasing");
            }
            prev = t;
        }
        if run.init == InitName::Gaussian {
            positive(Field::InitSd, "init_sd", run.init_sd)?;
        }
        Ok(())
    }

    fn validate_fit(&self) -> Result<(), ConfigIssue> {
        let fit = &self.fit;
        if fit.families.is_empty() {
            return issue(Field::Families, "at least one family is required");
        }
        for (i, f) in fit.families.iter().enumerate() {
            if fit.families[..i].contains(f) {
                return issue(Field::Families, format!("family {f} is listed twice"));
            }
        }
        if fit.bootstrap_b == 0 {
            return issue(Field::BootstrapB, "bootstrap_B must be at least 1");
        }
        for &t in &fit.fit_times {
            if !self.run.snapshot_times.iter().any(|&s| same_time(s, t)) {
                return issue(Field::FitTimes, format!("fit time {t} is not one of run.snapshot_times"));
            }
        }
        Ok(())
    }

    /// Index into `run.snapshot_times` of a validated fit time.
    pub fn snapshot_index(&self, t: f64) -> Option<usize> {
        self.run.snapshot_times.iter().position(|&s| same_time(s, t))
    }

    pub fn topology_seed(&self) -> u64 {
        derive_seed(self.run.seed, TOPOLOGY_STREAM)
    }

    pub fn topology(&self) -> Result<Option<NetworkTopology>, CliError> {
        let big_n = self.run.n_agents;
        let topo = match self.dynamics.kind {
            DynamicsKind::Complete => build_complete(big_n)?,
            DynamicsKind::RegularRing => {
                let n = self
                    .ring_neighbours()
                    .ok_or_else(|| CliError::Config("regular_ring needs a whole n = z*N".into()))?;
                build_regular_ring(big_n, n)?
            }
            DynamicsKind::RandomSmallWorld => {
                let p = self
                    .dynamics
                    .p_sw
                    .ok_or_else(|| CliError::Config("random_small_world requires p_sw".into()))?;
                build_random_smallworld(big_n, p, self.topology_seed())?
            }
            DynamicsKind::MeanField | DynamicsKind::Eft => return Ok(None),
        };
        Ok(Some(topo))
    }

    pub fn sim_config(&self) -> Result<SimConfig, CliError> {
        self.validate().map_err(|e| CliError::Config(e.to_string()))?;
        let dynamics = match self.dynamics.kind {
            DynamicsKind::MeanField => Dynamics::MeanField,
            DynamicsKind::Eft => Dynamics::Eft {
                gamma: self.dynamics.gamma_eft.unwrap_or(1.0),
            },
            _ => Dynamics::Network(Arc::new(self.topology()?.expect("network kind"))),
        };
        Ok(SimConfig {
            params: ModelParams::from_sigma2(self.model.sigma2, self.model.j)?,
            dynamics,
            scheme: self.run.scheme.into(),
            n_agents: self.run.n_agents,
            dt: self.run.dt,
            t_end: self.run.t_end,
            snapshot_times: self.run.snapshot_times.clone(),
            init: match self.run.init {
                InitName::Ones => InitialCondition::AllOnes,
                InitName::Gaussian => InitialCondition::Gaussian { sd: self.run.init_sd },
            },
            seed: self.run.seed,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: Option<Spanned<RawModel>>,
    dynamics: Spanned<RawDynamics>,
    run: Spanned<RawRun>,
    fit: Option<Spanned<RawFit>>,
    output: Option<OutputSection>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    sigma2: Option<Spanned<f64>>,
    #[serde(rename = "J")]
    j: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDynamics {
    kind: Spanned<DynamicsKind>,
    z: Option<Spanned<f64>>,
    p_sw: Option<Spanned<f64>>,
    gamma_eft: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    #[serde(rename = "N")]
    n_agents: Option<Spanned<usize>>,
    dt: Option<Spanned<f64>>,
    t_end: Spanned<f64>,
    snapshot_times: Option<Spanned<Vec<f64>>>,
    scheme: Option<SchemeName>,
    init: Option<InitName>,
    init_sd: Option<Spanned<f64>>,
    seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFit {
    families: Option<Spanned<Vec<Family>>>,
    fit_times: Option<Spanned<Vec<f64>>>,
    #[serde(rename = "bootstrap_B")]
    bootstrap_b: Option<Spanned<usize>>,
}

/// Byte spans of the keys present in the source, with section fallbacks for
/// keys that were defaulted.
struct Spans(Vec<(Field, Range<usize>)>);

impl Spans {
    fn record<T>(&mut self, field: Field, fallback: &Range<usize>, value: Option<&Spanned<T>>) {
        let span = value.map_or_else(|| fallback.clone(), |v| v.span());
        self.0.push((field, span));
    }

    fn get(&self, field: Field) -> Range<usize> {
        self.0
            .iter()
            .find(|(f, _)| *f == field)
            .map_or(0..0, |(_, s)| s.clone())
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    (line, before[line_start..].chars().count() + 1)
}

/// Parses and validates a TOML config. `origin` labels diagnostics, which
/// read `origin:line:col: key: message`.
pub fn parse_toml(text: &str, origin: &str) -> Result<ExperimentConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let at = e.span().map(|s| {
            let (line, col) = line_col(text, s.start);
            format!("{line}:{col}: ")
        });
        CliError::Config(format!("{origin}:{}{}", at.unwrap_or_default(), e.message()))
    })?;

    let mut spans = Spans(Vec::new());
    let top = 0..0;
    let model_span = raw.model.as_ref().map_or(top.clone(), |m| m.span());
    let model = raw.model.as_ref().map(|m| m.get_ref());
    spans.record(Field::Sigma2, &model_span, model.and_then(|m| m.sigma2.as_ref()));
    spans.record(Field::J, &model_span, model.and_then(|m| m.j.as_ref()));

    let dyn_span = raw.dynamics.span();
    let dynamics = raw.dynamics.get_ref();
    spans.record(Field::Kind, &dyn_span, Some(&dynamics.kind));
    spans.record(Field::Z, &dyn_span, dynamics.z.as_ref());
    spans.record(Field::PSw, &dyn_span, dynamics.p_sw.as_ref());
    spans.record(Field::GammaEft, &dyn_span, dynamics.gamma_eft.as_ref());

    let run_span = raw.run.span();
    let run = raw.run.get_ref();
    spans.record(Field::N, &run_span, run.n_agents.as_ref());
    spans.record(Field::Dt, &run_span, run.dt.as_ref());
    spans.record(Field::TEnd, &run_span, Some(&run.t_end));
    spans.record(Field::SnapshotTimes, &run_span, run.snapshot_times.as_ref());
    spans.record(Field::InitSd, &run_span, run.init_sd.as_ref());

    let fit_span = raw.fit.as_ref().map_or(top, |f| f.span());
    let fit = raw.fit.as_ref().map(|f| f.get_ref());
    spans.record(Field::Families, &fit_span, fit.and_then(|f| f.families.as_ref()));
    spans.record(Field::FitTimes, &fit_span, fit.and_then(|f| f.fit_times.as_ref()));
    spans.record(Field::BootstrapB, &fit_span, fit.and_then(|f| f.bootstrap_b.as_ref()));

    let value = |s: &Option<Spanned<f64>>| s.as_ref().map(|v| *v.get_ref());
    let t_end = *run.t_end.get_ref();
    let snapshot_times = run
        .snapshot_times
        .as_ref()
        .map_or_else(|| vec![t_end], |v| v.get_ref().clone());
    let config = ExperimentConfig {
        model: ModelSection {
            sigma2: model.and_then(|m| value(&m.sigma2)).unwrap_or(DEFAULT_SIGMA2),
            j: model.and_then(|m| value(&m.j)).unwrap_or(DEFAULT_J),
        },
        dynamics: DynamicsSection {
            kind: *dynamics.kind.get_ref(),
            z: value(&dynamics.z),
            p_sw: value(&dynamics.p_sw),
            gamma_eft: value(&dynamics.gamma_eft),
        },
        run: RunSection {
            n_agents: run.n_agents.as_ref().map_or(DEFAULT_N, |v| *v.get_ref()),
            dt: value(&run.dt).unwrap_or(DEFAULT_DT),
            t_end,
            snapshot_times: snapshot_times.clone(),
            scheme: run.scheme.unwrap_or(SchemeName::Milstein),
            init: run.init.unwrap_or(InitName::Ones),
            init_sd: value(&run.init_sd).unwrap_or(DEFAULT_INIT_SD),
            seed: run.seed.unwrap_or(0),
        },
        fit: FitSection {
            families: fit
                .and_then(|f| f.families.as_ref())
                .map_or_else(|| Family::ALL.to_vec(), |v| v.get_ref().clone()),
            fit_times: fit
                .and_then(|f| f.fit_times.as_ref())
                .map_or(snapshot_times, |v| v.get_ref().clone()),
            bootstrap_b: fit
                .and_then(|f| f.bootstrap_b.as_ref())
                .map_or(DEFAULT_BOOTSTRAP_B, |v| *v.get_ref()),
        },
        output: raw.output,
    };

    config.validate().map_err(|e| {
        let (line, col) = line_col(text, spans.get(e.field).start);
        CliError::Config(format!("{origin}:{line}:{col}: {e}"))
    })?;
    Ok(config)
}

/// Reads the `config` object of a run manifest.
pub fn parse_manifest(text: &str, origin: &str) -> Result<ExperimentConfig, CliError> {
    #[derive(Deserialize)]
    struct ManifestConfig {
        config: ExperimentConfig,
    }
    let m: ManifestConfig = serde_json::from_str(text).map_err(|e| {
        CliError::Config(format!("{origin}:{}:{}: {e}", e.line(), e.column()))
    })?;
    m.config
        .validate()
        .map_err(|e| CliError::Config(format!("{origin}: config.{e}")))?;
    Ok(m.config)
}

/// Loads a TOML config, or a run manifest when the file ends in `.json`.
pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: cannot read config: {e}", path.display())))?;
    let origin = path.display().to_string();
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        parse_manifest(&text, &origin)
    } else {
        parse_toml(&text, &origin)
    }
}
