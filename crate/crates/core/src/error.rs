use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a documented precondition (bad k, qubit out of range, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// The dependency graph is not a DAG.
    #[error("structural error: {0}")]
    Structural(String),

    /// A quantity is undefined for the given input (zero depth, no usable fit points).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unsupported construct `{token}`{}", line.map(|l| format!(" on line {l}")).unwrap_or_default())]
    Unsupported { token: String, line: Option<usize> },

    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("circuit needs {needed} qubits but the device has {available}")]
    Capacity { needed: usize, available: usize },

    /// Durations from different pipeline stages are inconsistent with each other.
    #[error("pipeline inconsistency: {0}")]
    PipelineInconsistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn unsupported(token: impl Into<String>) -> Self {
        Error::Unsupported {
            token: token.into(),
            line: None,
        }
    }
}
