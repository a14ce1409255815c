//! Strong-convergence harness against the exact uncoupled solution
//! `w_T = w_0 exp(√2 σ B_T − σ² T)`.
//!
//! All step sizes share one set of fine Brownian paths. Coarse increments are
//! sums of fine ones; the auxiliary integrals combine as
//! `ΔZ = Σ_k (ΔZ_k + h (B_{t_k} − B_{t_0}))`.

use serde::Serialize;

use super::{increments_from_normals, milstein_step, taylor15_step};
use super::{Dynamics, ModelParams, NoiseIncrement, Scheme, WealthState};
use crate::{rng, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub scheme: String,
    pub dts: Vec<f64>,
    pub strong_errors: Vec<f64>,
    pub fitted_slope: f64,
}

/// Least-squares slope of `ln err` against `ln dt`.
pub(crate) fn loglog_slope(dts: &[f64], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Mean absolute error at `t_end` for each step size, with `J = 0` and
/// `w_0 = 1`, over `paths` independent Brownian paths.
pub fn strong_convergence(
    scheme: Scheme,
    sigma: f64,
    dts: &[f64],
    paths: usize,
    t_end: f64,
    seed: u64,
) -> Result<ConvergenceReport> {
    if dts.len() < 2 {
        return Err(Error::invalid("need at least two step sizes"));
    }
    if let Some(&bad) = dts.iter().find(|&&d| !(d > 0.0 && d.is_finite())) {
        return Err(Error::invalid(format!("step sizes must be positive, got {bad}")));
    }
    if paths == 0 || !(t_end > 0.0) {
        return Err(Error::invalid("need paths >= 1 and t_end > 0"));
    }
    let params = ModelParams::new(sigma, 0.0)?;
    let h = dts.iter().cloned().fold(f64::INFINITY, f64::min);
    let fine_steps = whole_ratio(t_end, h)?;
    let ratios = dts.iter().map(|&d| whole_ratio(d, h)).collect::<Result<Vec<_>>>()?;
    for (&d, &r) in dts.iter().zip(&ratios) {
        if fine_steps % r != 0 {
            return Err(Error::invalid(format!("dt = {d} does not divide t_end = {t_end}")));
        }
    }

    // Fine increments, path-major.
    let m = fine_steps as usize;
    let mut fine_db = vec![0.0; paths * m];
    let mut fine_dz = vec![0.0; paths * m];
    for p in 0..paths {
        for k in 0..m {
            let (xi1, xi2) = rng::normal_pair(seed, p as u64, k as u64);
            let (b, z) = increments_from_normals(xi1, xi2, h);
            fine_db[p * m + k] = b;
            fine_dz[p * m + k] = z;
        }
    }
    let exact: Vec<f64> = (0..paths)
        .map(|p| {
            let bt: f64 = fine_db[p * m..(p + 1) * m].iter().sum();
            (std::f64::consts::SQRT_2 * sigma * bt - sigma * sigma * t_end).exp()
        })
        .collect();

    let dynamics = Dynamics::MeanField;
    let zero_drift = vec![0.0; paths];
    let mut strong_errors = Vec::with_capacity(dts.len());
    for (&dt, &r) in dts.iter().zip(&ratios) {
        let r = r as usize;
        let mut state = WealthState::new(0.0, vec![1.0; paths]);
        let mut noise = NoiseIncrement::zeros(paths, scheme.needs_dz());
        for block in 0..m / r {
            for p in 0..paths {
                let (mut b, mut z) = (0.0, 0.0);
                for k in block * r..(block + 1) * r {
                    z += fine_dz[p * m + k] + h * b;
                    b += fine_db[p * m + k];
                }
                noise.db[p] = b;
                if let Some(dz) = noise.dz.as_mut() {
                    dz[p] = z;
                }
            }
            state = match scheme {
                Scheme::Milstein => milstein_step(&state, &zero_drift, sigma, dt, &noise)?,
                Scheme::Taylor15 => taylor15_step(&state, &dynamics, &params, dt, &noise)?,
            };
        }
        let err = state.w.iter().zip(&exact).map(|(a, b)| (a - b).abs()).sum::<f64>() / paths as f64;
        strong_errors.push(err);
    }
    Ok(ConvergenceReport {
        scheme: match scheme {
            Scheme::Milstein => "milstein",
            Scheme::Taylor15 => "taylor15",
        }
        .to_string(),
        dts: dts.to_vec(),
        fitted_slope: loglog_slope(dts, &strong_errors),
        strong_errors,
    })
}

fn whole_ratio(a: f64, h: f64) -> Result<u64> {
    let r = (a / h).round();
    if r < 1.0 || (r * h - a).abs() > 1e-9 * a {
        return Err(Error::invalid(format!("{a} is not a whole multiple of the finest step {h}")));
    }
    Ok(r as u64)
}
