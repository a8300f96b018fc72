use thiserror::Error;

/// Errors raised by samplers, norming computations and experiments.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("need at least {required} points, got {n}")]
    TooFewPoints { n: usize, required: usize },

    #[error(
        "root finding did not converge after {iterations} iterations \
         (bracket [{lo}, {hi}], residuals [{f_lo}, {f_hi}])"
    )]
    RootNotConverged {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
        iterations: usize,
    },

    #[error("sample size n = {n} is below the threshold n >= {min_n} where {what} is defined")]
    BelowThreshold { n: u64, min_n: u64, what: &'static str },

    #[error("tail value underflows at x = {0}")]
    Underflow(f64),

    #[error("acceptance rate {rate:e} is below 1e-6; lower the threshold x (currently {x})")]
    AcceptanceTooLow { rate: f64, x: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
