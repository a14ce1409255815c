//! Interaction drifts and the derivative terms the order-1.5 scheme needs.

use super::{mean, Dynamics, ModelParams, WealthState};
use crate::dist::{theta_of_gamma, StationaryInputs};
use crate::nettop::{NetworkTopology, TopologyKind};
use crate::{Error, Result};

/// Network drift `f_i = (J/n) Σ_{j ∈ N(i)} (x_j − x_i)`, written into `out`.
///
/// The map is linear in `x`, which the Taylor scheme relies on to apply the
/// drift Jacobian with the same routine.
pub(crate) fn apply_network(topo: &NetworkTopology, j: f64, x: &[f64], out: &mut [f64]) {
    let c = j / topo.n_divisor();
    if topo.kind() == TopologyKind::Complete {
        // Σ_{j≠i} (x_j − x_i) = S − N x_i
        let s: f64 = x.iter().sum();
        let n = x.len() as f64;
        for (o, &xi) in out.iter_mut().zip(x) {
            *o = c * (s - n * xi);
        }
        return;
    }
    for (i, o) in out.iter_mut().enumerate() {
        let nb = topo.neighbors(i);
        let s: f64 = nb.iter().map(|&k| x[k as usize]).sum();
        *o = c * (s - nb.len() as f64 * x[i]);
    }
}

/// Mean-field drift `f_i = J (x̄ − x_i)`.
pub(crate) fn apply_mean_field(j: f64, x: &[f64], out: &mut [f64]) {
    let m = mean(x);
    for (o, &xi) in out.iter_mut().zip(x) {
        *o = j * (m - xi);
    }
}

pub fn interaction_drift(state: &WealthState, topology: &NetworkTopology, j: f64) -> Result<Vec<f64>> {
    if topology.n_agents() != state.len() {
        return Err(Error::invalid(format!(
            "state has {} agents but topology has {}",
            state.len(),
            topology.n_agents()
        )));
    }
    if !(topology.n_divisor() > 0.0) {
        return Err(Error::invalid("coupling divisor must be positive"));
    }
    let mut out = vec![0.0; state.len()];
    apply_network(topology, j, &state.w, &mut out);
    Ok(out)
}

pub fn mf_drift(state: &WealthState, j: f64) -> Result<Vec<f64>> {
    if state.is_empty() {
        return Err(Error::invalid("mean-field drift of an empty state"));
    }
    let mut out = vec![0.0; state.len()];
    apply_mean_field(j, &state.w, &mut out);
    Ok(out)
}

/// Effective-field drift `f_i = J (θ w_i^{1−γ} − w_i)`; agents decouple.
pub fn eft_drift(state: &WealthState, j: f64, gamma_eft: f64, theta: f64) -> Result<Vec<f64>> {
    let eft = Eft::new(j, gamma_eft, theta)?;
    if let Some((i, &w)) = state.w.iter().enumerate().find(|(_, &w)| !(w > 0.0)) {
        return Err(Error::domain(format!("effective-field drift needs w > 0, agent {i} has {w}")));
    }
    Ok(state.w.iter().map(|&w| eft.drift(w)).collect())
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Eft {
    j: f64,
    gamma: f64,
    theta: f64,
}

impl Eft {
    pub(crate) fn new(j: f64, gamma: f64, theta: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::domain(format!("gamma_eft must lie in (0, 1], got {gamma}")));
        }
        if !(theta > 0.0) {
            return Err(Error::domain(format!("theta must be positive, got {theta}")));
        }
        Ok(Eft { j, gamma, theta })
    }

    #[inline]
    pub(crate) fn drift(&self, w: f64) -> f64 {
        self.j * (self.theta * w.powf(1.0 - self.gamma) - w)
    }

    /// `(f, f', f'')` at `w`.
    #[inline]
    pub(crate) fn derivatives(&self, w: f64) -> (f64, f64, f64) {
        let wg = w.powf(-self.gamma);
        let f = self.j * (self.theta * w * wg - w);
        let d1 = self.j * ((1.0 - self.gamma) * self.theta * wg - 1.0);
        let d2 = -self.j * self.gamma * (1.0 - self.gamma) * self.theta * wg / w;
        (f, d1, d2)
    }
}

/// Resolved drift for one run: dynamics plus parameters, with θ precomputed.
#[derive(Debug, Clone)]
pub(crate) enum DriftModel<'a> {
    Network { topo: &'a NetworkTopology, j: f64 },
    MeanField { j: f64 },
    Eft(Eft),
}

impl<'a> DriftModel<'a> {
    pub(crate) fn new(dynamics: &'a Dynamics, params: &ModelParams, n_agents: usize) -> Result<Self> {
        Ok(match dynamics {
            Dynamics::Network(topo) => {
                if topo.n_agents() != n_agents {
                    return Err(Error::InvalidConfig(format!(
                        "topology has {} agents but the run has {n_agents}",
                        topo.n_agents()
                    )));
                }
                if !(topo.n_divisor() > 0.0) {
                    return Err(Error::InvalidConfig(
                        "network coupling divisor is zero (p_sw * N = 0)".into(),
                    ));
                }
                DriftModel::Network { topo, j: params.j }
            }
            Dynamics::MeanField => DriftModel::MeanField { j: params.j },
            Dynamics::Eft { gamma } => {
                let theta = if params.j > 0.0 {
                    theta_of_gamma(&StationaryInputs::new(params.j, params.sigma2(), *gamma)?)?
                } else {
                    1.0
                };
                DriftModel::Eft(Eft::new(params.j, *gamma, theta)?)
            }
        })
    }

    pub(crate) fn drift(&self, w: &[f64], out: &mut [f64]) {
        match self {
            DriftModel::Network { topo, j } => apply_network(topo, *j, w, out),
            DriftModel::MeanField { j } => apply_mean_field(*j, w, out),
            DriftModel::Eft(eft) => {
                for (o, &x) in out.iter_mut().zip(w) {
                    *o = eft.drift(x);
                }
            }
        }
    }

    /// Order-1.5 auxiliary terms given the drift `a` and the scaled noise
    /// `v_k = b_k ΔZ_k`:
    ///
    /// - `cross_k = Σ_j ∂_j a_k · v_j`
    /// - `l0a_k = Σ_l a_l ∂_l a_k + ½ Σ_l b_l² ∂²_l a_k`
    pub(crate) fn taylor_terms(
        &self,
        w: &[f64],
        a: &[f64],
        v: &[f64],
        b2: impl Fn(f64) -> f64,
        cross: &mut [f64],
        l0a: &mut [f64],
    ) {
        match self {
            DriftModel::Network { topo, j } => {
                apply_network(topo, *j, v, cross);
                apply_network(topo, *j, a, l0a);
            }
            DriftModel::MeanField { j } => {
                apply_mean_field(*j, v, cross);
                apply_mean_field(*j, a, l0a);
            }
            DriftModel::Eft(eft) => {
                for k in 0..w.len() {
                    let (f, d1, d2) = eft.derivatives(w[k]);
                    cross[k] = d1 * v[k];
                    l0a[k] = f * d1 + 0.5 * b2(w[k]) * d2;
                }
            }
        }
    }
}
