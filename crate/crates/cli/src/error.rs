use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] mux_overhead::Error),

    #[error("{0}")]
    Validation(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// 0 success, 2 validation, 3 pipeline inconsistency, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        use mux_overhead::Error as E;
        match self {
            CliError::Core(E::PipelineInconsistency(_)) => 3,
            CliError::Core(E::Io(_)) | CliError::Io { .. } => 4,
            CliError::Csv(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => 4,
            CliError::Core(E::Csv(e)) if matches!(e.kind(), csv::ErrorKind::Io(_)) => 4,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
