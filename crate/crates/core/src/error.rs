use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("unstable step {step}: stability bound is {bound} (0.2 h^2 / max kappa)")]
    UnstableStep { step: f64, bound: f64 },

    #[error("quadratic truncation out of regime at phase {phase}: discriminant {discriminant} < 0")]
    OutOfRegime { phase: f64, discriminant: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("root finder did not converge: {0}")]
    NoConvergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
