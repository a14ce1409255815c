//! Ensemble simulation of the Bouchaud–Mézard wealth dynamics on networks,
//! together with the distribution-fitting and goodness-of-fit machinery used
//! to identify the stationary wealth law.
//!
//! Module map:
//!
//! - [`nettop`]: complete, regular-ring and random small-world topologies.
//! - [`engine`]: drifts, Milstein and order-1.5 strong Taylor steps, ensemble
//!   driver and the strong-convergence harness.
//! - [`dist`]: generalized inverse gamma and lognormal laws plus the analytic
//!   stationary parameters.
//! - [`fit`]: maximum-likelihood fits (LN, IGa, GIGa).
//! - [`gof`]: Kolmogorov–Smirnov statistic and parametric-bootstrap p-values.
//! - [`rng`]: counter-based random streams.

pub mod dist;
pub mod engine;
mod error;
pub mod fit;
pub mod gof;
pub mod nettop;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
