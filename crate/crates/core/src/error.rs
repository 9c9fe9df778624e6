use thiserror::Error;

use crate::domain::Domain;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("need at least 2 workers, got {0}")]
    InsufficientWorkers(usize),

    #[error("invalid fault level {value} for the {model} model")]
    InvalidFault { model: &'static str, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pairwise vector is not transitive")]
    NonTransitive,

    #[error("{what} does not apply to the {domain} domain")]
    DomainMismatch { what: String, domain: Domain },

    #[error("singular fault inversion: estimated mean fault hits 1/(1+theta)")]
    SingularInversion,

    #[error("weights sum to {0}, cannot aggregate")]
    DegenerateWeights(f64),

    #[error("oracle aggregation needs true fault levels or a ground truth")]
    OracleUnavailable,

    #[error("{candidates} candidates exceeds the exact search cap of {cap}")]
    ExceedsExactSearch { candidates: usize, cap: usize },

    #[error("unknown rule id `{0}`")]
    UnknownRule(String),

    #[error("unknown estimator id `{0}`")]
    UnknownEstimator(String),

    #[error("unknown method id `{0}`")]
    UnknownMethod(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported file format version `{0}`")]
    FormatVersion(String),

    #[error("invalid config: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
