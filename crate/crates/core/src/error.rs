use thiserror::Error;

/// Errors raised by assembly, stepping, fitting and the batch front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("index out of range: ({i}, {j}) for a system with {n} unknowns")]
    IndexOutOfRange { i: usize, j: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("singular pivot at row {row}")]
    SingularPivot { row: usize },

    #[error("non-finite state at step {step}")]
    NonFinite { step: usize },

    #[error("invalid configuration `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("{0}")]
    Usage(String),

    #[error("malformed trace file at line {line}: {reason}")]
    Trace { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code: 1 for usage/configuration problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SingularPivot { .. } | Error::NonFinite { .. } | Error::Fit(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
