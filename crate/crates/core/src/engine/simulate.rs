use rayon::prelude::*;

use super::drift::DriftModel;
use super::step::{check_positivity, milstein_update, TaylorScratch};
use super::{increments_from_normals, InitialCondition, Scheme, SimConfig, Snapshot};
use crate::rng;
use crate::{Error, Result};

/// Agent count above which noise generation runs on the rayon pool. Output
/// does not depend on it.
const PAR_MIN_AGENTS: usize = 8192;

/// Counter reserved for initial-condition draws (counts down on resampling).
const INIT_COUNTER: u64 = u64::MAX;

/// A run that stopped early. `partial` holds every snapshot emitted before the
/// failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("simulation aborted after {} snapshot(s): {error}", partial.len())]
pub struct SimAbort {
    pub error: Error,
    pub partial: Vec<Snapshot>,
}

impl From<Error> for SimAbort {
    fn from(error: Error) -> Self {
        SimAbort {
            error,
            partial: Vec::new(),
        }
    }
}

fn step_index(t: f64, dt: f64) -> Result<u64> {
    let k = (t / dt).round();
    if (k * dt - t).abs() > 1e-9 * t.abs().max(1.0) {
        return Err(Error::InvalidConfig(format!(
            "time {t} is not a multiple of dt = {dt}"
        )));
    }
    Ok(k as u64)
}

fn validate(config: &SimConfig) -> Result<(u64, Vec<u64>)> {
    if config.n_agents == 0 {
        return Err(Error::InvalidConfig("N must be positive".into()));
    }
    if !(config.dt > 0.0 && config.dt.is_finite()) {
        return Err(Error::InvalidConfig(format!("dt must be positive, got {}", config.dt)));
    }
    if !(config.t_end >= 0.0 && config.t_end.is_finite()) {
        return Err(Error::InvalidConfig(format!("t_end must be non-negative, got {}", config.t_end)));
    }
    if let InitialCondition::Gaussian { sd } = config.init {
        if !(sd > 0.0 && sd.is_finite()) {
            return Err(Error::InvalidConfig(format!("initial sd must be positive, got {sd}")));
        }
    }
    let steps = step_index(config.t_end, config.dt)?;
    let mut prev = -1.0;
    let mut snaps = Vec::with_capacity(config.snapshot_times.len());
    for &t in &config.snapshot_times {
        if !(t >= 0.0 && t <= config.t_end) {
            return Err(Error::InvalidConfig(format!(
                "snapshot time {t} outside [0, {}]",
                config.t_end
            )));
        }
        if t <= prev {
            return Err(Error::InvalidConfig("snapshot times must be strictly increasing".into()));
        }
        prev = t;
        snaps.push(step_index(t, config.dt)?);
    }
    Ok((steps, snaps))
}

pub(crate) fn initial_state(init: InitialCondition, n: usize, seed: u64) -> Vec<f64> {
    match init {
        InitialCondition::AllOnes => vec![1.0; n],
        InitialCondition::Gaussian { sd } => (0..n as u64)
            .map(|i| {
                (0..)
                    .map(|attempt| 1.0 + sd * rng::normal(seed, i, INIT_COUNTER - attempt))
                    .find(|&w| w > 0.0)
                    .expect("resampling terminates")
            })
            .collect(),
    }
}

/// Runs the ensemble and returns the requested snapshots.
///
/// The result is a pure function of `config`: noise comes from per-agent
/// counter streams keyed by `(seed, agent, step)` and each step reads only the
/// frozen previous state.
pub fn simulate(config: &SimConfig) -> std::result::Result<Vec<Snapshot>, SimAbort> {
    let (steps, snap_steps) = validate(config)?;
    let n = config.n_agents;
    let model = DriftModel::new(&config.dynamics, &config.params, n)?;
    let sigma = config.params.sigma;
    let dt = config.dt;
    let with_dz = config.scheme.needs_dz();

    let mut w = initial_state(config.init, n, config.seed);
    let mut next = vec![0.0; n];
    let mut drift = vec![0.0; n];
    let mut db = vec![0.0; n];
    let mut dz = if with_dz { vec![0.0; n] } else { Vec::new() };
    let mut taylor = with_dz.then(|| TaylorScratch::new(n));

    let mut snapshots = Vec::with_capacity(snap_steps.len());
    let mut pending = snap_steps.iter().zip(&config.snapshot_times).peekable();
    let mut emit = |k: u64, w: &[f64], out: &mut Vec<Snapshot>| {
        while let Some((_, &t)) = pending.next_if(|(&s, _)| s == k) {
            out.push(Snapshot { t, w: w.to_vec() });
        }
    };
    emit(0, &w, &mut snapshots);

    for k in 0..steps {
        draw_noise(config.seed, k, dt, &mut db, with_dz.then_some(dz.as_mut_slice()), n);
        model.drift(&w, &mut drift);
        match (config.scheme, taylor.as_mut()) {
            (Scheme::Taylor15, Some(scratch)) => {
                scratch.step(&model, &w, &drift, sigma, dt, &db, &dz, &mut next)
            }
            _ => milstein_update(&w, &drift, sigma, dt, &db, &mut next),
        }
        let t = (k + 1) as f64 * dt;
        if let Err(error) = check_positivity(&next, k + 1, t) {
            return Err(SimAbort {
                error,
                partial: snapshots,
            });
        }
        std::mem::swap(&mut w, &mut next);
        emit(k + 1, &w, &mut snapshots);
    }
    Ok(snapshots)
}

fn draw_noise(seed: u64, step: u64, dt: f64, db: &mut [f64], dz: Option<&mut [f64]>, n: usize) {
    if n < PAR_MIN_AGENTS {
        super::fill_noise(seed, step, dt, db, dz);
        return;
    }
    match dz {
        Some(dz) => db
            .par_iter_mut()
            .zip(dz.par_iter_mut())
            .enumerate()
            .with_min_len(1024)
            .for_each(|(i, (b, z))| {
                let (xi1, xi2) = rng::normal_pair(seed, i as u64, step);
                (*b, *z) = increments_from_normals(xi1, xi2, dt);
            }),
        None => {
            let sq = dt.sqrt();
            db.par_iter_mut()
                .enumerate()
                .with_min_len(1024)
                .for_each(|(i, b)| *b = sq * rng::normal(seed, i as u64, step));
        }
    }
}
