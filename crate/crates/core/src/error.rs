use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violates the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An integrand or coefficient produced a non-finite value.
    #[error("non-finite value {value} at t = {t}")]
    NonFinite { t: f64, value: f64 },

    /// Adaptive quadrature hit its depth or subdivision limit.
    #[error("quadrature did not converge on [{a}, {b}] (error estimate {error:e})")]
    Convergence { a: f64, b: f64, error: f64 },

    /// An exponentially truncated integral never reached its cutoff.
    #[error("exponent stayed below the cutoff up to t = {reached} (start {start}, exponent {exponent}); the integral is suspected to diverge")]
    DivergenceSuspect { start: f64, reached: f64, exponent: f64 },

    /// `∫_{x-d}^{x+d} q` never reached 2 within the search horizon.
    #[error("insufficient mass around x = {x}: integral {mass} < 2 up to half-width {horizon}")]
    InsufficientMass { x: f64, horizon: f64, mass: f64 },

    /// No covering cell center could be found.
    #[error("covering failed after {cells} cells: no center beyond {endpoint} within the horizon")]
    CoveringFailure { cells: usize, endpoint: f64 },

    /// Missing or inconsistent configuration (e.g. no stored decomposition).
    #[error("configuration error: {0}")]
    Configuration(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors signalling that a one-sided mass integral looks finite.
    pub fn is_divergence_suspect(&self) -> bool {
        matches!(
            self,
            Error::DivergenceSuspect { .. } | Error::InsufficientMass { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
