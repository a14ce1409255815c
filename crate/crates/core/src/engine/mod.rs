//! Time integration of the rescaled Itô dynamics
//!
//! ```text
//! dw_i = √2 σ w_i dB_i + f_i(w) dt
//! ```
//!
//! where the interaction drift `f` comes from a network, the mean-field
//! limit, or the decoupled effective-field ansatz. The rescaling
//! `W_i = w_i e^{σ²t}` removes the secular growth of the unscaled model, so
//! the stationary law is observed directly on `w`.

use std::sync::Arc;

use crate::nettop::NetworkTopology;
use crate::{Error, Result};

mod convergence;
mod drift;
mod simulate;
mod step;

pub use convergence::{strong_convergence, ConvergenceReport};
pub use drift::{eft_drift, interaction_drift, mf_drift};
pub use simulate::{simulate, SimAbort};
pub use step::{milstein_step, taylor15_step};

/// Noise amplitude `σ` and coupling strength `J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub sigma: f64,
    pub j: f64,
}

impl ModelParams {
    pub fn new(sigma: f64, j: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
        }
        if !(j >= 0.0 && j.is_finite()) {
            return Err(Error::invalid(format!("J must be non-negative, got {j}")));
        }
        Ok(ModelParams { sigma, j })
    }

    pub fn from_sigma2(sigma2: f64, j: f64) -> Result<Self> {
        if !(sigma2 > 0.0) {
            return Err(Error::invalid(format!("sigma2 must be positive, got {sigma2}")));
        }
        Self::new(sigma2.sqrt(), j)
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma * self.sigma
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WealthState {
    pub t: f64,
    pub w: Vec<f64>,
}

impl WealthState {
    pub fn new(t: f64, w: Vec<f64>) -> Self {
        WealthState { t, w }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn mean_w(&self) -> f64 {
        mean(&self.w)
    }
}

/// Wiener increments `ΔB` over one step, plus the auxiliary
/// `ΔZ = ∫ (B_s − B_t) ds` needed by the order-1.5 scheme. Jointly Gaussian
/// with `Var ΔB = Δt`, `Var ΔZ = Δt³/3`, `Cov(ΔB, ΔZ) = Δt²/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseIncrement {
    pub db: Vec<f64>,
    pub dz: Option<Vec<f64>>,
}

impl NoiseIncrement {
    pub fn zeros(n: usize, with_dz: bool) -> Self {
        NoiseIncrement {
            db: vec![0.0; n],
            dz: with_dz.then(|| vec![0.0; n]),
        }
    }

    /// Draws the increments of step `step` from the counter-based streams,
    /// one stream per agent.
    pub fn draw(seed: u64, step: u64, n: usize, dt: f64, with_dz: bool) -> Self {
        let mut db = vec![0.0; n];
        let mut dz = with_dz.then(|| vec![0.0; n]);
        fill_noise(seed, step, dt, &mut db, dz.as_deref_mut());
        NoiseIncrement { db, dz }
    }
}

#[inline]
pub(crate) fn increments_from_normals(xi1: f64, xi2: f64, dt: f64) -> (f64, f64) {
    let db = dt.sqrt() * xi1;
    let dz = 0.5 * dt * dt.sqrt() * (xi1 + xi2 / 3f64.sqrt());
    (db, dz)
}

pub(crate) fn fill_noise(seed: u64, step: u64, dt: f64, db: &mut [f64], dz: Option<&mut [f64]>) {
    match dz {
        Some(dz) => {
            for (i, (b, z)) in db.iter_mut().zip(dz.iter_mut()).enumerate() {
                let (xi1, xi2) = crate::rng::normal_pair(seed, i as u64, step);
                (*b, *z) = increments_from_normals(xi1, xi2, dt);
            }
        }
        None => {
            let sq = dt.sqrt();
            for (i, b) in db.iter_mut().enumerate() {
                *b = sq * crate::rng::normal(seed, i as u64, step);
            }
        }
    }
}

/// Source of the interaction drift.
#[derive(Debug, Clone, PartialEq)]
pub enum Dynamics {
    Network(Arc<NetworkTopology>),
    MeanField,
    /// Decoupled agents with drift `J(θ w^{1−γ} − w)`.
    Eft { gamma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Milstein,
    Taylor15,
}

impl Scheme {
    pub fn needs_dz(self) -> bool {
        matches!(self, Scheme::Taylor15)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    AllOnes,
    /// Normal around one with standard deviation `sd`, resampled until
    /// positive.
    Gaussian { sd: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub params: ModelParams,
    pub dynamics: Dynamics,
    pub scheme: Scheme,
    pub n_agents: usize,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
    pub init: InitialCondition,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub w: Vec<f64>,
}

/// `W_i = w_i e^{σ²t}`.
pub fn to_unscaled(w: &[f64], sigma: f64, t: f64) -> Vec<f64> {
    let g = (sigma * sigma * t).exp();
    w.iter().map(|&x| x * g).collect()
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}
