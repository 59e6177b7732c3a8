use thiserror::Error;

use crate::integrator::SimState;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid band: {0}")]
    InvalidBand(String),

    #[error("band mismatch: expected M = {expected}, got M = {found}")]
    BandMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("field has support outside the resolved set F (max |coefficient| on G = {0:e})")]
    SupportViolation(f64),

    #[error("memory clock must be nonnegative, got tau = {0}")]
    NegativeTau(f64),

    #[error("band M = {m} exceeds the direct-summation guard of {limit}")]
    BandTooLarge { m: usize, limit: usize },

    #[error("cannot shrink band from M = {from} to M = {to}")]
    ShrinkingBand { from: usize, to: usize },

    /// The solver could not continue; `last_good` is the last accepted state.
    /// Near a singularity this is an expected outcome rather than a bug.
    #[error("integration failed at t = {t}: {reason}")]
    IntegrationFailure {
        t: f64,
        reason: String,
        last_good: Box<SimState>,
    },

    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("malformed config: {0}")]
    ConfigSyntax(#[from] serde_json::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(key: &str, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.to_string(),
            msg: msg.into(),
        }
    }
}
