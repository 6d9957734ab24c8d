use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("self-localization needs 3 flag sightings, got {0}")]
    Localization(usize),

    #[error("{path}: line {line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Neural(#[from] ssdenoise_neural::NeuralError),

    #[error("{} changed since it was produced; delete it to regenerate", .0.display())]
    Modified(PathBuf),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl std::fmt::Display, line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            path: path.to_string(),
            line,
            reason: reason.into(),
        }
    }

    /// Whether the failure stems from input the user can fix (configuration,
    /// files on disk) rather than a defect.
    pub fn is_user_error(&self) -> bool {
        match self {
            Error::Config(_) | Error::Parse { .. } | Error::Io { .. } | Error::Modified(_) => true,
            Error::Stage { source, .. } => source.is_user_error(),
            Error::Domain(_) | Error::Localization(_) | Error::Neural(_) => false,
        }
    }
}
