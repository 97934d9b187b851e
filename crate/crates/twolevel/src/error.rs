use std::path::PathBuf;

use thiserror::Error;

use crate::mtx::MtxError;
use crate::plan_io::PlanFormatError;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Mtx {
        path: PathBuf,
        #[source]
        source: MtxError,
    },
    #[error(transparent)]
    Plan(#[from] PlanFormatError),
    #[error(transparent)]
    Core(#[from] twolevel_core::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }
}
