use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An outcome, parameter, or hyperparameter outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A report that no reachable hyperparameter could have produced.
    #[error("inversion-domain error: {0}")]
    InversionDomain(String),

    /// An operation called outside the region where its closed form holds.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Decoded hyperparameters that cannot be pooled against the prior.
    #[error("aggregation error: {0}")]
    Aggregation(String),

    /// Report or outcome shape does not fit the scoring rule.
    #[error("arity mismatch: {0}")]
    Arity(String),

    #[error("empty candidate grid")]
    EmptyGrid,

    /// Prior mass that does not decay inside the quadrature box.
    #[error("non-normalizable hyperparameter: {0}")]
    NonNormalizable(String),

    #[error("unrealizable mean parameter: {0}")]
    Unrealizable(String),

    /// Second-moment report whose implied covariance is not PSD.
    #[error("inconsistent report: {0}")]
    InconsistentReport(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
