use thiserror::Error;

/// Errors raised by the model, the numerical kernels and the CLI.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter or argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error("quadrature did not converge: value {value:e}, error estimate {error_estimate:e}, requested {tolerance:e}")]
    Convergence {
        value: f64,
        error_estimate: f64,
        tolerance: f64,
    },

    /// The integrand or target function returned a non-finite value.
    #[error("non-finite function value {value} at x = {x:e}")]
    NonFinite { x: f64, value: f64 },

    /// The function has the same sign at both ends of the search interval.
    #[error("no sign change on [{lo:e}, {hi:e}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    NoBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// A structure that is looked for does not exist for these parameters.
    #[error("no root: {0}")]
    NoRoot(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
