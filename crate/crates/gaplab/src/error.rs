use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum GaplabError {
    #[error("config error: {0}")]
    Config(String),
    #[error("eigensolve failed: {0}")]
    Eigensolve(gaplab_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("malformed report: {0}")]
    Report(String),
}

impl GaplabError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::UnknownField(_) | Self::Report(_) => 2,
            Self::Eigensolve(_) => 3,
            Self::Io { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, GaplabError>;
