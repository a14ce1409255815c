//! Generalized inverse gamma (GIGa) and lognormal laws, and the analytic
//! stationary parameters of the mean-field and effective-field dynamics.
//!
//! GIGa density:
//!
//! ```text
//! f(w) = γ / (β Γ(α)) · exp(-(β/w)^γ) · (β/w)^(1+αγ),   w > 0
//! ```
//!
//! If `X ~ Gamma(α, 1)` then `β X^(-1/γ)` is GIGa, so the CDF is the
//! regularized upper incomplete gamma `Q(α, (β/w)^γ)`. The inverse gamma
//! (IGa) law is the `γ = 1` member. All densities are evaluated in log space.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};
use serde::{Deserialize, Serialize};

use crate::special::{gamma_q, ln_gamma, normal_cdf};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GigaParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_support(w: f64) -> Result<()> {
    if w > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("density support is w > 0, got {w}")))
    }
}

impl GigaParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        check_positive("beta", beta)?;
        check_positive("gamma", gamma)?;
        Ok(GigaParams { alpha, beta, gamma })
    }

    /// Inverse gamma, the `γ = 1` member.
    pub fn inverse_gamma(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, beta, 1.0)
    }

    /// `(β/w)^γ` computed as `exp(γ(ln β − ln w))`.
    #[inline]
    fn reduced(&self, w: f64) -> f64 {
        (self.gamma * (self.beta.ln() - w.ln())).exp()
    }

    pub fn logpdf(&self, w: f64) -> Result<f64> {
        check_support(w)?;
        let lr = self.gamma * (self.beta.ln() - w.ln());
        Ok(self.gamma.ln() - self.beta.ln() - ln_gamma(self.alpha) - lr.exp()
            + (1.0 / self.gamma + self.alpha) * lr)
    }

    pub fn pdf(&self, w: f64) -> Result<f64> {
        self.logpdf(w).map(f64::exp)
    }

    pub fn cdf(&self, w: f64) -> Result<f64> {
        check_support(w)?;
        Ok(self.cdf_unchecked(w))
    }

    #[inline]
    pub(crate) fn cdf_unchecked(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        gamma_q(self.alpha, self.reduced(w))
    }

    /// Mean `β Γ(α − 1/γ) / Γ(α)`, finite only when `αγ > 1`.
    pub fn mean(&self) -> Option<f64> {
        (self.alpha * self.gamma > 1.0).then(|| {
            self.beta * (ln_gamma(self.alpha - 1.0 / self.gamma) - ln_gamma(self.alpha)).exp()
        })
    }

    /// Tail exponent `1 + αγ` of the density.
    pub fn tail_exponent(&self) -> f64 {
        1.0 + self.alpha * self.gamma
    }

    /// Inverse CDF by bracketed root finding on `ln w`: bisection to a narrow
    /// bracket, then safeguarded Newton steps.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::domain(format!("quantile level must lie in (0, 1), got {u}")));
        }
        let cdf_log = |l: f64| self.cdf_unchecked(l.exp());
        let centre = self.beta.ln();
        let (mut lo, mut hi) = (centre - 1.0, centre + 1.0);
        let mut width = 1.0;
        while cdf_log(lo) > u {
            width *= 2.0;
            lo = centre - width;
            if width > 1e4 {
                return Err(Error::domain("quantile bracket diverged below"));
            }
        }
        width = 1.0;
        while cdf_log(hi) < u {
            width *= 2.0;
            hi = centre + width;
            if width > 1e4 {
                return Err(Error::domain("quantile bracket diverged above"));
            }
        }
        while hi - lo > 1e-3 {
            let mid = 0.5 * (lo + hi);
            if cdf_log(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut l = 0.5 * (lo + hi);
        for _ in 0..100 {
            let f = cdf_log(l) - u;
            if f.abs() <= 1e-13 {
                break;
            }
            if f < 0.0 {
                lo = l;
            } else {
                hi = l;
            }
            let w = l.exp();
            let slope = self.pdf(w)? * w;
            let mut next = l - f / slope;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - l).abs() < 1e-15 * l.abs().max(1.0) {
                l = next;
                break;
            }
            l = next;
        }
        Ok(l.exp())
    }

    /// I.i.d. draws `β X^(-1/γ)` with `X ~ Gamma(α, 1)`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gamma = Gamma::new(self.alpha, 1.0).expect("alpha validated positive");
        (0..count)
            .map(|_| {
                let x: f64 = gamma.sample(&mut rng);
                self.beta * (-x.ln() / self.gamma).exp()
            })
            .collect()
    }
}

pub fn giga_pdf(p: &GigaParams, w: f64) -> Result<f64> {
    p.pdf(w)
}

pub fn giga_logpdf(p: &GigaParams, w: f64) -> Result<f64> {
    p.logpdf(w)
}

pub fn giga_cdf(p: &GigaParams, w: f64) -> Result<f64> {
    p.cdf(w)
}

pub fn giga_sample(p: &GigaParams, count: usize, seed: u64) -> Vec<f64> {
    p.sample(count, seed)
}

/// Lognormal law: `ln w ~ Normal(mu, s²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LnParams {
    pub mu: f64,
    pub s: f64,
}

impl LnParams {
    pub fn new(mu: f64, s: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::invalid(format!("mu must be finite, got {mu}")));
        }
        check_positive("s", s)?;
        Ok(LnParams { mu, s })
    }

    pub fn logpdf(&self, w: f64) -> Result<f64> {
        check_support(w)?;
        let z = (w.ln() - self.mu) / self.s;
        Ok(-w.ln() - self.s.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln() - 0.5 * z * z)
    }

    pub fn pdf(&self, w: f64) -> Result<f64> {
        self.logpdf(w).map(f64::exp)
    }

    pub fn cdf(&self, w: f64) -> Result<f64> {
        check_support(w)?;
        Ok(self.cdf_unchecked(w))
    }

    #[inline]
    pub(crate) fn cdf_unchecked(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        normal_cdf((w.ln() - self.mu) / self.s)
    }

    pub fn median(&self) -> f64 {
        self.mu.exp()
    }

    pub fn mean(&self) -> f64 {
        (self.mu + 0.5 * self.s * self.s).exp()
    }

    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(self.mu, self.s).expect("s validated positive");
        (0..count).map(|_| normal.sample(&mut rng).exp()).collect()
    }
}

pub fn ln_pdf(p: &LnParams, w: f64) -> Result<f64> {
    p.pdf(w)
}

pub fn ln_cdf(p: &LnParams, w: f64) -> Result<f64> {
    p.cdf(w)
}

pub fn ln_sample(p: &LnParams, count: usize, seed: u64) -> Vec<f64> {
    p.sample(count, seed)
}

/// Arguments of the stationary solution: coupling `J`, noise variance `σ²`
/// and the effective-field exponent `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryInputs {
    pub j: f64,
    pub sigma2: f64,
    pub gamma_eft: f64,
}

impl StationaryInputs {
    pub fn new(j: f64, sigma2: f64, gamma_eft: f64) -> Result<Self> {
        let inp = StationaryInputs { j, sigma2, gamma_eft };
        inp.validate()?;
        Ok(inp)
    }

    fn validate(&self) -> Result<()> {
        check_positive("J", self.j)?;
        check_positive("sigma2", self.sigma2)?;
        if !(self.gamma_eft > 0.0 && self.gamma_eft <= 1.0) {
            return Err(Error::domain(format!(
                "effective-field exponent must lie in (0, 1], got {}",
                self.gamma_eft
            )));
        }
        Ok(())
    }
}

/// Normalizer `θ(γ)` that pins the stationary mean wealth to one:
///
/// ```text
/// θ = (γσ²/J) · (Γ((J+σ²)/(γσ²)) / Γ(J/(γσ²)))^γ
/// ```
///
/// evaluated through log-gamma differences since both arguments grow like
/// `1/γ`. At `γ = 1` the ratio is `Γ(x+1)/Γ(x) = x` and θ is exactly 1.
pub fn theta_of_gamma(inp: &StationaryInputs) -> Result<f64> {
    inp.validate()?;
    let StationaryInputs { j, sigma2, gamma_eft: g } = *inp;
    if g == 1.0 {
        return Ok(1.0);
    }
    let scale = g * sigma2;
    let log_ratio = ln_gamma((j + sigma2) / scale) - ln_gamma(j / scale);
    Ok(scale / j * (g * log_ratio).exp())
}

/// `lim_{γ→0⁺} θ(γ) = (1 + σ²/J)^(1 + J/σ²) / e`, from Stirling's formula
/// applied to the log-gamma difference.
pub fn theta_small_gamma_limit(j: f64, sigma2: f64) -> Result<f64> {
    check_positive("J", j)?;
    check_positive("sigma2", sigma2)?;
    let r = j / sigma2;
    Ok(((1.0 + r) * (1.0 + 1.0 / r).ln() - 1.0).exp())
}

/// Stationary GIGa law of the effective-field dynamics, normalized to unit
/// mean: `α = (J+σ²)/(γσ²)`, `β = (Jθ/(σ²γ))^(1/γ)`. With `γ = 1` this is the
/// mean-field inverse gamma with `α = 1 + J/σ²`, `β = J/σ²`.
pub fn stationary_giga(inp: &StationaryInputs) -> Result<GigaParams> {
    let theta = theta_of_gamma(inp)?;
    let StationaryInputs { j, sigma2, gamma_eft: g } = *inp;
    let alpha = (j + sigma2) / (g * sigma2);
    let beta = if g == 1.0 {
        j * theta / sigma2
    } else {
        ((j * theta / (sigma2 * g)).ln() / g).exp()
    };
    GigaParams::new(alpha, beta, g)
}

/// Lognormal transient of the uncoupled (`J = 0`) rescaled dynamics:
/// `ln w(t) ~ Normal(−σ²t, 2σ²t)`.
pub fn transient_lognormal_j0(sigma: f64, t: f64) -> Result<LnParams> {
    check_positive("sigma", sigma)?;
    if !(t > 0.0) {
        return Err(Error::domain(format!("transient law needs t > 0, got {t}")));
    }
    LnParams::new(-sigma * sigma * t, sigma * (2.0 * t).sqrt())
}
