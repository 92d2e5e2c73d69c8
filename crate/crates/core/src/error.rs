use std::time::Duration;

use thiserror::Error;

use crate::problog::LogViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("trace is empty")]
    EmptyTrace,
    #[error("invalid activity name: {0}")]
    InvalidActivity(String),
    #[error("weight {0} is outside (0, 1]")]
    InvalidWeight(f64),
    #[error("epsilon {0} is outside [1e-6, 1 - 1e-6]")]
    InvalidEpsilon(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid net: {0}")]
    InvalidNet(String),
    #[error("invalid log: {0}")]
    InvalidLog(String),
    #[error("log validation failed: {}", join(.0))]
    LogValidation(Vec<LogViolation>),
    #[error("activity universe needs an alternative for `{0}`")]
    UniverseTooSmall(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("final marking is not reachable")]
    NoAlignment,
    #[error("search budget of {0} expansions exceeded")]
    NodeBudgetExceeded(u64),
    #[error("search timed out after {0:?}")]
    Timeout(Duration),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("unsupported feature at {location}: {message}")]
    UnsupportedFeature { location: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotEnabled(_) => "not_enabled",
            Error::UnknownTransition(_) => "unknown_transition",
            Error::EmptyTrace => "empty_trace",
            Error::InvalidActivity(_) => "invalid_activity",
            Error::InvalidWeight(_) => "invalid_weight",
            Error::InvalidEpsilon(_) => "invalid_epsilon",
            Error::InvalidInput(_) => "invalid_input",
            Error::InvalidNet(_) => "invalid_net",
            Error::InvalidLog(_) => "invalid_log",
            Error::LogValidation(_) => "log_validation",
            Error::UniverseTooSmall(_) => "universe_too_small",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::NoAlignment => "no_alignment",
            Error::NodeBudgetExceeded(_) => "node_budget_exceeded",
            Error::Timeout(_) => "timeout",
            Error::Parse { .. } => "parse_error",
            Error::UnsupportedFeature { .. } => "unsupported_feature",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { location: location.into(), message: message.into() }
    }

    pub(crate) fn unsupported(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::UnsupportedFeature { location: location.into(), message: message.into() }
    }
}

fn join(violations: &[LogViolation]) -> String {
    violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
