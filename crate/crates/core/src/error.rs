use thiserror::Error;

/// Errors raised by constructors and operations whose preconditions fail.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("unstable step size: h^2 * sigma = {h2_sigma} must be below 4")]
    Unstable { h2_sigma: f64 },

    #[error("unsupported combination: {0}")]
    Unsupported(&'static str),

    #[error("series has zero variance; effective sample size is undefined")]
    ZeroVariance,

    #[error("series too short: need at least {min} samples, got {len}")]
    SeriesTooShort { min: usize, len: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, value: impl Into<f64>, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value: value.into(),
            reason,
        }
    }
}

/// Checks a scalar parameter and builds an [`Error::InvalidParameter`] on failure.
pub(crate) fn ensure<T: crate::Scalar>(
    ok: bool,
    name: &'static str,
    value: T,
    reason: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(name, value.as_f64(), reason))
    }
}
