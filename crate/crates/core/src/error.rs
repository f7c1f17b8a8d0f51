use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{function}: argument {value} outside domain ({reason})")]
    Domain {
        function: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("series truncation failed: tail bound {achieved:e} > eps {eps:e} after {terms} terms")]
    Truncation { eps: f64, achieved: f64, terms: u64 },

    #[error("saddle solver did not converge in {iterations} iterations; best bracket [{lo}, {hi}]")]
    Convergence { iterations: usize, lo: f64, hi: f64 },

    #[error("quadrature did not reach tolerance {tol:e}: estimate {estimate}, error estimate {error:e}")]
    Quadrature { tol: f64, estimate: f64, error: f64 },

    #[error("log recurrence: inexact division by {index} (internal error)")]
    InexactDivision { index: usize },

    #[error("compute budget exceeded: {reason}")]
    Budget { reason: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn check_k(k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("k", "must be a positive integer"));
    }
    Ok(())
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::invalid(name, format!("must be finite and > 0, got {value}")));
    }
    Ok(())
}
