use std::fmt;
use std::path::Path;

use weightlab_core::Error as CoreError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Io,
    Validation,
    NotFound,
    Numeric,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Io => 1,
            ErrorKind::Validation => 2,
            ErrorKind::NotFound => 3,
            ErrorKind::Numeric => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ErrorKind::Io => "io",
            ErrorKind::Validation => "validation",
            ErrorKind::NotFound => "not-found",
            ErrorKind::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        Self { kind, message: message.into() }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Validation, message)
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Self::new(ErrorKind::Io, format!("{}: {err}", path.display()))
    }

    pub fn missing(path: &Path, what: &str) -> Self {
        Self::new(ErrorKind::NotFound, format!("{what} not found at {}", path.display()))
    }

    /// The single line printed on failure.
    pub fn line(&self) -> String {
        let flat = self.message.replace('\n', " ");
        format!("error[{}]: {flat}", self.kind.label())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.line())
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let kind = match e {
            CoreError::InvalidParameter { .. }
            | CoreError::GridTooLarge { .. }
            | CoreError::InsufficientGrid { .. }
            | CoreError::MisalignedGrid { .. }
            | CoreError::GridMismatch { .. } => ErrorKind::Validation,
            CoreError::NotFound { .. } => ErrorKind::NotFound,
            CoreError::EmptyGrid
            | CoreError::NonFinite { .. }
            | CoreError::NonIncreasing { .. }
            | CoreError::NonMonotonic { .. }
            | CoreError::HypothesisNotMet { .. } => ErrorKind::Numeric,
        };
        Self::new(kind, e.to_string())
    }
}
