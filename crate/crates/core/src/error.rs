use thiserror::Error;

/// Errors produced by numerical routines and estimators.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A root bracket is invalid (function values share a sign, or lo >= hi).
    #[error("invalid bracket [{lo}, {hi}]: {reason}")]
    Bracket { lo: f64, hi: f64, reason: String },

    /// A hyperparameter equation has no solution in the search bracket.
    #[error("elicitation failed: {0}")]
    Elicitation(String),

    /// Samples cannot support a grid (all equal, or too few).
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    /// No samples fall inside the grid range.
    #[error("empty histogram: no samples fall inside the grid")]
    EmptyHistogram,

    /// A bin carries posterior mass but zero prior mass, so the relative
    /// belief ratio is undefined there.
    #[error("bin {index} has posterior mass {posterior} but zero prior mass")]
    ZeroPriorMass { index: usize, posterior: f64 },

    /// The conditional sampler could not bracket the inverse-cdf target.
    #[error("sampler failed: {0}")]
    Sampler(String),

    /// A density underflowed to zero where a ratio was required.
    #[error("density underflow at psi = {psi}")]
    DensityUnderflow { psi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
