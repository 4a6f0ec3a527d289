use thiserror::Error;

/// Errors raised by the simulators and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A closed-form parameter left its domain of validity.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Too much weight reached the outermost Fock level of some mode.
    #[error("truncation overflow: edge population {edge_population:.3e} on mode {mode} exceeds {limit:.1e}")]
    TruncationOverflow {
        mode: usize,
        edge_population: f64,
        limit: f64,
    },

    /// Numerical integration lost more probability than allowed.
    #[error("quadrature too coarse: trace error {trace_error:.3e} exceeds {limit:.1e}")]
    QuadratureTooCoarse { trace_error: f64, limit: f64 },

    /// A numerically built state missed its known moments.
    #[error("not converged: {what} deviates by {deviation:.3e}, limit {limit:.1e}")]
    NotConverged { what: String, deviation: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
