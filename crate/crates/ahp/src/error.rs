use std::path::Path;

/// Errors raised outside the numerical core.
#[derive(Debug, thiserror::Error)]
pub enum AhpError {
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error(transparent)]
    Validation(#[from] ahp_core::Error),
    #[error("invalid request: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("session {0} not found")]
    NotFound(String),
    #[error("version conflict: request expected version {expected}, session is at {current}")]
    Conflict { expected: u64, current: u64 },
    #[error("incomplete matrix: {0}")]
    Incomplete(String),
}

impl AhpError {
    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        AhpError::Parse { location: location.into(), message: message.into() }
    }

    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        AhpError::Io { path: path.as_ref().display().to_string(), source }
    }

    /// Machine-readable identifier; validation errors reuse the core codes.
    pub fn code(&self) -> &'static str {
        match self {
            AhpError::Parse { .. } => "parse_error",
            AhpError::Validation(e) => e.code(),
            AhpError::Invalid(_) => "validation_error",
            AhpError::Io { .. } => "io_error",
            AhpError::NotFound(_) => "not_found",
            AhpError::Conflict { .. } => "version_conflict",
            AhpError::Incomplete(_) => "incomplete_matrix",
        }
    }

    /// Process exit status: 2 validation, 3 parse, 4 environment.
    pub fn exit_code(&self) -> i32 {
        match self {
            AhpError::Parse { .. } => 3,
            AhpError::Io { .. } => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, AhpError>;
