//! Bounded-parameter problems: a normal mean known to lie in an interval and
//! a Poisson rate known to lie in an interval.
//!
//! For both, the relative belief ratio at a hypothesized value is the ratio
//! of the exact sampling probability to the prior predictive probability of
//! the observed statistic, estimated with one large simulation from the
//! prior predictive binned over the data range. Bias, confidence, and
//! accuracy tables all come from that shared histogram.

pub mod normal;
pub mod poisson;

pub use normal::{
    bias_against_histogram, bias_in_favor_normal, confidence_table, elicit_beta,
    elicit_truncnorm, ConstrainedNormalSpec, ConstrainedPrior, PredictiveHistogram,
};
pub use poisson::{
    elicit_gamma, poisson_bias_against, poisson_bias_in_favor, poisson_confidence_table,
    ConstrainedPoissonSpec, PoissonHistogram,
};

/// One row of a frequentist/Bayesian confidence table.
#[derive(Debug, Clone, Copy)]
pub struct ConfidenceRow {
    pub n: u32,
    /// 1 - max bias against over the parameter grid: a lower bound on the
    /// frequentist coverage of the plausible region.
    pub frequentist: f64,
    /// 1 - prior-averaged bias against: the Bayesian coverage.
    pub bayesian: f64,
}
