//! Kolmogorov–Smirnov distance and parametric-bootstrap p-values.
//!
//! Parameters are estimated from the data, so the asymptotic KS null law does
//! not apply. Instead each replicate draws `n` points from the fitted law,
//! refits the same family and records its KS distance; the p-value is the
//! fraction of replicates at least as far from their own fit as the data.

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::fit::{fit_family, Family, FitParams, FitReport};
use crate::rng::derive_seed;
use crate::{Error, Result};

/// Two-sided KS distance between the empirical CDF of `samples` and `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("KS statistic of an empty sample"));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::invalid("KS statistic of a sample containing NaN"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted.iter().enumerate().fold(0.0f64, |acc, (i, &x)| {
        let f = cdf(x);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        acc.max(above).max(below)
    });
    Ok(d.clamp(0.0, 1.0))
}

/// Asymptotic one-sample KS critical value `c(α)/√n` for a fully specified
/// null, with `c = √(−ln(α/2)/2)`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GofReport {
    pub fit: FitReport,
    pub ks_stat: f64,
    /// `exceed_count / bootstrap_count`.
    pub p_value: f64,
    /// Replicates with `D_b ≥ D_obs`.
    pub exceed_count: usize,
    /// Replicates that refitted successfully.
    pub bootstrap_count: usize,
    pub discarded_replicates: usize,
}

impl GofReport {
    pub fn family(&self) -> Family {
        self.fit.family
    }
}

impl Serialize for GofReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("GofReport", 8)?;
        s.serialize_field("family", &self.fit.family)?;
        s.serialize_field("params", &self.fit.params)?;
        s.serialize_field("loglik", &self.fit.loglik)?;
        s.serialize_field("ks_stat", &self.ks_stat)?;
        s.serialize_field("p_value", &self.p_value)?;
        s.serialize_field("k", &self.exceed_count)?;
        s.serialize_field("B", &self.bootstrap_count)?;
        s.serialize_field("discarded_replicates", &self.discarded_replicates)?;
        s.end()
    }
}

fn fitted_ks(samples: &[f64], params: &FitParams) -> Result<f64> {
    ks_statistic(samples, |w| params.cdf(w))
}

/// Fits `family` by maximum likelihood and computes its KS distance and a
/// parametric-bootstrap p-value from `b` replicates.
///
/// Replicate `r` uses seed `derive_seed(seed, r)`; replicates run on the
/// rayon pool and are reduced in index order, so the report does not depend
/// on scheduling.
pub fn ks_pvalue_bootstrap(samples: &[f64], family: Family, b: usize, seed: u64) -> Result<GofReport> {
    if b == 0 {
        return Err(Error::invalid("bootstrap needs at least one replicate"));
    }
    let fit = fit_family(family, samples)?;
    let d_obs = fitted_ks(samples, &fit.params)?;
    let n = samples.len();
    let replicate_d: Vec<Option<f64>> = (0..b as u64)
        .into_par_iter()
        .map(|r| {
            let synthetic = fit.params.sample(n, derive_seed(seed, r));
            fit_family(family, &synthetic)
                .and_then(|refit| fitted_ks(&synthetic, &refit.params))
                .ok()
        })
        .collect();
    let discarded = replicate_d.iter().filter(|d| d.is_none()).count();
    let used = b - discarded;
    if used == 0 {
        return Err(Error::DegenerateSample(format!(
            "all {b} bootstrap replicates failed to refit"
        )));
    }
    let exceed = replicate_d.iter().flatten().filter(|&&d| d >= d_obs).count();
    Ok(GofReport {
        fit,
        ks_stat: d_obs,
        p_value: exceed as f64 / used as f64,
        exceed_count: exceed,
        bootstrap_count: used,
        discarded_replicates: discarded,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyFailure {
    pub family: Family,
    pub error: String,
}

/// Families ranked best-first by p-value; log-likelihood breaks ties.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyComparison {
    pub ranked: Vec<GofReport>,
    pub failures: Vec<FamilyFailure>,
}

impl FamilyComparison {
    pub fn best(&self) -> Option<&GofReport> {
        self.ranked.first()
    }

    pub fn best_by_loglik(&self) -> Option<&GofReport> {
        self.ranked
            .iter()
            .max_by(|a, b| a.fit.loglik.total_cmp(&b.fit.loglik))
    }

    pub fn get(&self, family: Family) -> Option<&GofReport> {
        self.ranked.iter().find(|r| r.family() == family)
    }
}

/// Fits and bootstraps every family in `families`. A family that fails is
/// recorded in `failures` and the rest are still ranked.
pub fn compare_families(samples: &[f64], families: &[Family], b: usize, seed: u64) -> FamilyComparison {
    let mut ranked = Vec::new();
    let mut failures = Vec::new();
    for &family in families {
        let family_seed = derive_seed(seed, family as u64 + 1);
        match ks_pvalue_bootstrap(samples, family, b, family_seed) {
            Ok(report) => ranked.push(report),
            Err(e) => failures.push(FamilyFailure {
                family,
                error: e.to_string(),
            }),
        }
    }
    ranked.sort_by(|a, b| {
        b.p_value
            .total_cmp(&a.p_value)
            .then(b.fit.loglik.total_cmp(&a.fit.loglik))
    });
    FamilyComparison { ranked, failures }
}
