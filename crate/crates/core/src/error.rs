use thiserror::Error;

/// Errors raised anywhere in the laboratory.
///
/// Variants split into two families: input validation (bad parameters,
/// violated hypotheses, unresolvable lattices) and numerical failure
/// (blow-up, non-convergence, dissipation violated). The harness maps the
/// first family to exit status 2 and the second to exit status 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("lattice under-resolved: {reason}; need n_time >= {required_n_time}")]
    UnderResolved {
        reason: String,
        required_n_time: usize,
    },

    #[error("zero denominator: {0}")]
    ZeroDenominator(String),

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error("dissipation violated at t = {time}: {norm} norm grew by relative {growth:e}")]
    Stability {
        time: f64,
        growth: f64,
        norm: String,
    },

    #[error("non-finite values (blow-up) at t = {time}")]
    BlowUp { time: f64 },

    #[error(
        "fixed-point iteration did not converge after {iterations} iterations (ratios {ratios:?})"
    )]
    NonConvergence { iterations: usize, ratios: Vec<f64> },

    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Stability { .. } | Error::BlowUp { .. } | Error::NonConvergence { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
