//! Error type shared by every module.

use alloc::string::String;

use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An input lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Evaluation overflowed (or produced NaN) even after log-domain fallback.
    #[error("non-finite result: {0}")]
    NonFinite(String),
    /// An iterative mean or iteration did not reach its tolerance.
    #[error("no convergence after {iterations} iterations (gap {gap:e})")]
    NoConvergence { iterations: usize, gap: f64 },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    /// Aczél deficiency `x0² - Σ x_k²` (or the y analogue) is negative.
    #[error("admissibility violated: {0}")]
    Admissibility(String),
    #[error("zero vector")]
    ZeroVector,
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("divergent series: {0}")]
    DivergentSeries(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
