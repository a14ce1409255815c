//! Special functions used by the distribution and fitting code.
//!
//! Log-gamma, digamma, the regularized incomplete gamma functions and `erfc`
//! come from `statrs`; trigamma is local.

pub use statrs::function::gamma::{digamma, ln_gamma};

/// Regularized upper incomplete gamma `Q(a, x)`, extended to `x = 0`
/// (returns 1) and `x = ∞` (returns 0).
pub fn gamma_q(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0);
    if x <= 0.0 {
        1.0
    } else if x.is_infinite() {
        0.0
    } else {
        statrs::function::gamma::checked_gamma_ur(a, x).unwrap_or(f64::NAN)
    }
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0);
    if x <= 0.0 {
        0.0
    } else if x.is_infinite() {
        1.0
    } else {
        statrs::function::gamma::checked_gamma_lr(a, x).unwrap_or(f64::NAN)
    }
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}

/// Trigamma ψ'(x) for x > 0: upward recurrence to x ≥ 10, then the
/// asymptotic series.
pub fn trigamma(mut x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let z = 1.0 / (x * x);
    // 1/x + 1/(2x²) + Σ B_{2k} / x^{2k+1}
    let series = 1.0 / x
        + z / 2.0
        + (z / x)
            * (1.0 / 6.0
                - z * (1.0 / 30.0
                    - z * (1.0 / 42.0 - z * (1.0 / 30.0 - z * (5.0 / 66.0 - z * 691.0 / 2730.0)))));
    acc + series
}
