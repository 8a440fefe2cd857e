use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("precision error: {0}")]
    Precision(String),

    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("unsupported point: {0}")]
    UnsupportedPoint(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{what} did not converge (best estimate {best}, error estimate {err_estimate:e})")]
    NonConvergence {
        what: String,
        best: String,
        err_estimate: f64,
    },

    #[error("integrand is not finite at interior point {at}")]
    Integrand { at: String },

    #[error("series acceleration failed: {0}")]
    Acceleration(String),

    #[error("unknown identity: {0}")]
    UnknownIdentity(String),

    #[error("integer relation search needs more digits: {0}")]
    NeedsMoreDigits(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    /// True for numeric failures (quadrature, acceleration, PSLQ precision).
    pub fn is_numeric_failure(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::Integrand { .. }
                | Error::Acceleration(_)
                | Error::NeedsMoreDigits(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
