//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by schedule construction, integration, and estimation.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument fell outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The adaptive integrator exhausted its step budget or produced a
    /// non-finite state; carries the scaled time it reached.
    #[error("integration failed at tau = {achieved_tau}: {msg}")]
    Integration { achieved_tau: f64, msg: String },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature did not converge: achieved error estimate {achieved}")]
    Quadrature { achieved: f64 },

    /// The complex square root could not be continued along the path.
    #[error("branch tracking failed: {0}; refine the path or shrink the panel")]
    BranchTracking(String),

    /// Numeric pole inversion did not converge.
    #[error("no pole found: {0}")]
    NoPoleFound(String),

    /// No sign change was bracketed when solving for the crossover time.
    #[error("no crossover: {0}")]
    NoCrossover(String),

    /// An operation was asked of a schedule family that does not support it.
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    /// Too few usable samples for the requested statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A serialized descriptor, curve, or report could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
