use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cache error at {path}: {message}")]
    Cache { path: PathBuf, message: String },
    #[error(transparent)]
    Compute(#[from] gammacoh::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn cache(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> CliError {
        CliError::Cache {
            path: path.into(),
            message: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        2
    }
}
