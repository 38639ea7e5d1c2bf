use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration is empty")]
    EmptyConfiguration,

    #[error("rejection sampler gave up after {attempts} attempts; acceptance probability is too small for this window and intensity")]
    AttemptsExhausted { attempts: u64 },

    #[error("birth-death chain has zero total event rate (lambda = 0 and no points)")]
    DeadChain,

    #[error("dominated CFTP did not coalesce after {doublings} doublings (horizon {horizon}); lambda is likely at or above the artificial phase transition")]
    CoalescenceFailure { doublings: u32, horizon: f64 },

    #[error("clan has already finished")]
    StepOnFinished,

    #[error("lambda = {lambda} is not below the critical bound {critical}")]
    SupercriticalLambda { lambda: f64, critical: f64 },

    #[error("I/O error: {0}")]
    Io(String),

    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    QuadratureFailed { tolerance: f64, estimate: f64 },
}

pub(crate) fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

pub(crate) fn check_nonnegative(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be non-negative and finite, got {value}"
        )))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
