use thiserror::Error;

/// Errors produced by the numerical kernels and the batch front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of the operation.
    #[error("invalid {field} = {value}: {reason}")]
    Domain {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Argument outside the documented accuracy window of a special function.
    #[error("argument {re}{im:+}i outside the accuracy window |Re z|, |Im z| <= {limit}")]
    OutOfRange { re: f64, im: f64, limit: f64 },

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (best estimate {estimate}, error bound {error_bound})"
    )]
    Convergence {
        estimate: f64,
        error_bound: f64,
        subdivisions: usize,
    },

    /// Too few accepted Monte Carlo samples to form a statistic.
    #[error(
        "only {accepted} of {drawn} samples accepted (need at least {required}); \
         increase the slit half-width or the sample count"
    )]
    Statistics {
        accepted: usize,
        drawn: usize,
        required: usize,
    },

    /// A branch-cut precondition was violated (radicand with non-positive real part).
    #[error("complex square root of {re}{im:+}i: radicand must have a positive real part")]
    Branch { re: f64, im: f64 },

    #[error("{0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain {
            field,
            value,
            reason: "must be a finite positive number",
        })
    }
}
