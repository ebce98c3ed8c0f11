use thiserror::Error;

use crate::peak::IterationTrace;

pub type Result<T, E = TrajError> = std::result::Result<T, E>;

/// Error taxonomy shared by every module. Each variant maps onto exactly one
/// CLI exit code, see [`TrajError::exit_code`].
#[derive(Debug, Error)]
pub enum TrajError {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("time {t} outside the valid interval [{start}, {end}]")]
    Domain { t: f64, start: f64, end: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("convergence error: {message}")]
    Convergence {
        message: String,
        trace: Box<IterationTrace>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl TrajError {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        TrajError::Validation(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        TrajError::Numerical(msg.into())
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            TrajError::Io(_) => 1,
            TrajError::Validation(_) | TrajError::Domain { .. } | TrajError::Parse { .. } => 2,
            TrajError::Convergence { .. } => 3,
            TrajError::Numerical(_) => 4,
        }
    }
}

impl From<serde_json::Error> for TrajError {
    fn from(err: serde_json::Error) -> Self {
        if err.is_io() {
            return TrajError::Io(err.into());
        }
        TrajError::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
