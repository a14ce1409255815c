use std::path::{Path, PathBuf};

use bmnet_core::dist::{stationary_giga, theta_of_gamma, theta_small_gamma_limit, StationaryInputs};

use crate::output::{num, Csv};
use crate::CliError;

/// Grid points on `(0, 1]`; the table adds the `γ → 0` limit as a first row.
pub const THETA_GRID: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaRow {
    pub gamma: f64,
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// `θ(γ)` with the stationary `(α, β)` on `γ = 0, 0.01, …, 1`. The `γ = 0` row
/// holds the analytic limit of `θ`, where `α` and `β` diverge.
pub fn theta_table(j: f64, sigma2: f64) -> Result<Vec<ThetaRow>, CliError> {
    for (name, x) in [("J", j), ("sigma2", sigma2)] {
        if !(x > 0.0 && x.is_finite()) {
            return Err(CliError::Config(format!("{name} must be positive and finite, got {x}")));
        }
    }
    let mut rows = vec![ThetaRow {
        gamma: 0.0,
        theta: theta_small_gamma_limit(j, sigma2)?,
        alpha: f64::INFINITY,
        beta: f64::INFINITY,
    }];
    for k in 1..=THETA_GRID {
        let gamma = k as f64 / THETA_GRID as f64;
        let inp = StationaryInputs::new(j, sigma2, gamma)?;
        let p = stationary_giga(&inp)?;
        rows.push(ThetaRow {
            gamma,
            theta: theta_of_gamma(&inp)?,
            alpha: p.alpha,
            beta: p.beta,
        });
    }
    Ok(rows)
}

/// Writes `theta.csv` with columns `gamma,theta,alpha,beta`.
pub fn theta(j: f64, sigma2: f64, out: &Path) -> Result<PathBuf, CliError> {
    let mut csv = Csv::new(&["gamma", "theta", "alpha", "beta"]);
    for r in theta_table(j, sigma2)? {
        csv.row([r.gamma, r.theta, r.alpha, r.beta].map(num));
    }
    let path = out.join("theta.csv");
    csv.write(&path)?;
    Ok(path)
}
