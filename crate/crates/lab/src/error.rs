use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),

    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),

    #[error(transparent)]
    Core(#[from] cgle_core::Error),

    #[error("write to {path} failed{}: {source}", step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    Io {
        path: PathBuf,
        step: Option<u64>,
        source: std::io::Error,
    },

    #[error("malformed file {path}: {reason}")]
    Malformed { path: PathBuf, reason: String },

    #[error("scenario mismatch: {0} vs {1}")]
    ScenarioMismatch(String, String),
}

impl LabError {
    pub(crate) fn io(path: impl Into<PathBuf>, step: Option<u64>) -> impl FnOnce(std::io::Error) -> LabError {
        let path = path.into();
        move |source| LabError::Io { path, step, source }
    }

    /// Process exit code: 2 for anything wrong with the input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) | LabError::Parse(_) | LabError::ScenarioMismatch(..) => 2,
            LabError::Core(cgle_core::Error::InvalidParameter(_) | cgle_core::Error::InvalidGrid(_)) => 2,
            LabError::Core(cgle_core::Error::TooCloseToBoundary { .. } | cgle_core::Error::CoincidentVortices { .. }) => 2,
            _ => 1,
        }
    }
}
