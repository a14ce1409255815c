use std::path::{Path, PathBuf};

use bmnet_core::engine::{strong_convergence, ConvergenceReport, Scheme};

use crate::output::write_json;
use crate::CliError;

/// `2⁻⁴ … 2⁻⁹`.
pub const DEFAULT_DTS: [f64; 6] = [0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625, 0.001953125];
pub const DEFAULT_PATHS: usize = 1000;
const HORIZON: f64 = 1.0;

/// Strong-error study of `scheme` on the uncoupled (`J = 0`) dynamics, whose
/// exact solution is known, up to `t = 1`.
pub fn convergence(scheme: Scheme, sigma2: f64, dts: &[f64], paths: usize, seed: u64) -> Result<ConvergenceReport, CliError> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(CliError::Config(format!("sigma2 must be positive and finite, got {sigma2}")));
    }
    if let Some(bad) = dts.iter().find(|&&d| !(d > 0.0 && d.is_finite())) {
        return Err(CliError::Config(format!("step sizes must be positive, got {bad}")));
    }
    Ok(strong_convergence(scheme, sigma2.sqrt(), dts, paths, HORIZON, seed)?)
}

/// Writes `convergence_<scheme>.json`.
pub fn write_convergence(report: &ConvergenceReport, out: &Path) -> Result<PathBuf, CliError> {
    let path = out.join(format!("convergence_{}.json", report.scheme.to_lowercase()));
    write_json(&path, report)?;
    Ok(path)
}
