//! Single-step integrators for the diagonal multiplicative noise
//! `g_i = √2 σ w_i`.
//!
//! Milstein (strong order 1):
//!
//! ```text
//! Δw = f Δt + g ΔB + ½ g g' (ΔB² − Δt),   ½ g g' = σ² w
//! ```
//!
//! Order-1.5 strong Taylor, with `c = √2 σ`, `L⁰ = Σ a_l ∂_l + ½ Σ g_l² ∂²_l`:
//!
//! ```text
//! Δw_k = a_k Δt + g_k ΔB_k + σ² w_k (ΔB_k² − Δt)
//!      + Σ_j g_j ∂_j a_k ΔZ_j
//!      + c a_k (ΔB_k Δt − ΔZ_k)
//!      + ½ (L⁰ a_k) Δt²
//!      + ½ c³ w_k (ΔB_k²/3 − Δt) ΔB_k
//! ```
//!
//! Diagonal noise makes every mixed multiple Itô integral vanish, so no Lévy
//! areas are needed.

use std::f64::consts::SQRT_2;

use super::drift::DriftModel;
use super::{Dynamics, ModelParams, NoiseIncrement, WealthState};
use crate::{Error, Result};

pub(crate) fn milstein_update(w: &[f64], a: &[f64], sigma: f64, dt: f64, db: &[f64], out: &mut [f64]) {
    let c = SQRT_2 * sigma;
    let s2 = sigma * sigma;
    for k in 0..w.len() {
        let x = w[k];
        let b = db[k];
        out[k] = x + a[k] * dt + c * x * b + s2 * x * (b * b - dt);
    }
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn taylor_update(
    w: &[f64],
    a: &[f64],
    cross: &[f64],
    l0a: &[f64],
    sigma: f64,
    dt: f64,
    db: &[f64],
    dz: &[f64],
    out: &mut [f64],
) {
    let c = SQRT_2 * sigma;
    let s2 = sigma * sigma;
    let c3 = c * c * c;
    for k in 0..w.len() {
        let x = w[k];
        let b = db[k];
        out[k] = x
            + a[k] * dt
            + c * x * b
            + s2 * x * (b * b - dt)
            + cross[k]
            + c * a[k] * (b * dt - dz[k])
            + 0.5 * l0a[k] * dt * dt
            + 0.5 * c3 * x * (b * b / 3.0 - dt) * b;
    }
}

/// Scratch buffers for the order-1.5 step.
#[derive(Debug, Default)]
pub(crate) struct TaylorScratch {
    v: Vec<f64>,
    cross: Vec<f64>,
    l0a: Vec<f64>,
}

impl TaylorScratch {
    pub(crate) fn new(n: usize) -> Self {
        TaylorScratch {
            v: vec![0.0; n],
            cross: vec![0.0; n],
            l0a: vec![0.0; n],
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn step(
        &mut self,
        model: &DriftModel<'_>,
        w: &[f64],
        a: &[f64],
        sigma: f64,
        dt: f64,
        db: &[f64],
        dz: &[f64],
        out: &mut [f64],
    ) {
        let c = SQRT_2 * sigma;
        for k in 0..w.len() {
            self.v[k] = c * w[k] * dz[k];
        }
        let c2 = c * c;
        model.taylor_terms(w, a, &self.v, |x| c2 * x * x, &mut self.cross, &mut self.l0a);
        taylor_update(w, a, &self.cross, &self.l0a, sigma, dt, db, dz, out);
    }
}

/// First non-positive (or non-finite) entry, reported as a positivity error.
pub(crate) fn check_positivity(w: &[f64], step: u64, t: f64) -> Result<()> {
    match w.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
        None => Ok(()),
        Some(agent) => Err(Error::Positivity {
            agent,
            step,
            t,
            value: w[agent],
        }),
    }
}

fn check_sizes(state: &WealthState, drift_len: usize, noise: &NoiseIncrement, dt: f64) -> Result<()> {
    if !(dt > 0.0) {
        return Err(Error::invalid(format!("dt must be positive, got {dt}")));
    }
    if drift_len != state.len() || noise.db.len() != state.len() {
        return Err(Error::invalid(format!(
            "size mismatch: state {}, drift {}, noise {}",
            state.len(),
            drift_len,
            noise.db.len()
        )));
    }
    Ok(())
}

/// One Milstein step with a precomputed drift vector.
pub fn milstein_step(
    state: &WealthState,
    drift: &[f64],
    sigma: f64,
    dt: f64,
    noise: &NoiseIncrement,
) -> Result<WealthState> {
    check_sizes(state, drift.len(), noise, dt)?;
    let mut out = vec![0.0; state.len()];
    milstein_update(&state.w, drift, sigma, dt, &noise.db, &mut out);
    let t = state.t + dt;
    check_positivity(&out, 1, t)?;
    Ok(WealthState::new(t, out))
}

/// One order-1.5 strong Taylor step. Drift derivatives come analytically
/// from the dynamics.
pub fn taylor15_step(
    state: &WealthState,
    dynamics: &Dynamics,
    params: &ModelParams,
    dt: f64,
    noise: &NoiseIncrement,
) -> Result<WealthState> {
    check_sizes(state, state.len(), noise, dt)?;
    let dz = noise
        .dz
        .as_ref()
        .ok_or_else(|| Error::invalid("order-1.5 step needs the auxiliary increment dZ"))?;
    if dz.len() != state.len() {
        return Err(Error::invalid("dZ size mismatch"));
    }
    if state.is_empty() {
        return Err(Error::invalid("empty state"));
    }
    let model = DriftModel::new(dynamics, params, state.len())?;
    let n = state.len();
    let mut a = vec![0.0; n];
    model.drift(&state.w, &mut a);
    let mut out = vec![0.0; n];
    TaylorScratch::new(n).step(&model, &state.w, &a, params.sigma, dt, &noise.db, dz, &mut out);
    let t = state.t + dt;
    check_positivity(&out, 1, t)?;
    Ok(WealthState::new(t, out))
}
