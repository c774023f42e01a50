//! Relative-belief inference with frequentist reliability guarantees.
//!
//! The principle of evidence says a parameter value is supported exactly when
//! its posterior probability exceeds its prior probability. The set of
//! supported values, the plausible region, is never the whole parameter space
//! and is empty with prior probability zero, and its a-priori coverage can be
//! estimated by Monte Carlo, turning a Bayesian region into a calibrated
//! confidence region.
//!
//! The crate provides:
//!
//! - [`engine`]: grids, histogram masses, relative belief ratios, plausible /
//!   implausible / credible regions;
//! - [`fieller`]: the ratio-of-normal-means problem end to end (elicitation,
//!   closed forms, pivotal comparison, conditional-predictive sampling, bias
//!   estimation);
//! - [`constrained`]: bounded normal means and bounded Poisson rates with
//!   elicited beta, truncated-normal, and gamma priors, plus their bias and
//!   confidence tables;
//! - [`stats`]: the special functions, bisection, and seeded sampling
//!   everything else builds on.

pub mod constrained;
pub mod engine;
pub mod error;
pub mod fieller;
pub mod mc;
pub mod stats;

pub use error::{Error, Result};
pub use mc::MonteCarloEstimate;
pub use stats::RandomSource;
