use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parameters outside the supported regime: {0}")]
    Regime(String),
    #[error("{what} did not converge (error estimate {error_estimate:.3e}, tolerance {tolerance:.3e})")]
    NonConvergence {
        what: &'static str,
        error_estimate: f64,
        tolerance: f64,
    },
    #[error("degenerate field: {0}")]
    Degenerate(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("lower bound {lower} exceeds upper bound {upper}")]
    BoundOrder { lower: f64, upper: f64 },
    #[error("exponent singularity: {0}")]
    Singular(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
