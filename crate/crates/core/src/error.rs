use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown task `{0}`")]
    UnknownTask(String),

    #[error("unknown difficulty `{0}`")]
    UnknownDifficulty(String),

    #[error("invalid parameters for {task}: {reason}")]
    InvalidParams { task: &'static str, reason: String },

    #[error("{task}: generation failed for seed {seed} after {attempts} attempts")]
    RetriesExhausted {
        task: &'static str,
        seed: u64,
        attempts: u32,
    },

    #[error("unsupported resolution {0} (expected 512, 1024 or 2048)")]
    Resolution(u32),

    #[error("image dimensions differ: {left:?} vs {right:?}")]
    DimensionMismatch { left: (u32, u32), right: (u32, u32) },

    #[error("png: {0}")]
    Png(String),

    #[error("svg: {0}")]
    Svg(String),

    #[error("validation: {0}")]
    Validation(String),

    #[error("build assertion failed at {task}/{difficulty}/{seed}: {reason}")]
    BuildAssertion {
        task: String,
        difficulty: String,
        seed: u64,
        reason: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("yaml: {0}")]
    Yaml(#[from] serde_yaml::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by malformed inputs rather than the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. })
    }
}
