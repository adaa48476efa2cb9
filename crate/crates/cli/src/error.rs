use std::path::PathBuf;

use thiserror::Error;
use umbilic_core::Error as CoreError;

/// Stable process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INVALID_INPUT: i32 = 2;
    pub const CONSISTENCY: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                CoreError::NonTransversal { .. }
                | CoreError::NotAdmissible { .. }
                | CoreError::NotSymmetric { .. }
                | CoreError::InvalidArgument(_) => exit::INVALID_INPUT,
                CoreError::DegenerateCount { .. }
                | CoreError::EmptyCone
                | CoreError::DegeneratePoint
                | CoreError::ComplexRoots { .. }
                | CoreError::NoConvergence { .. }
                | CoreError::ComplexEigenvalue { .. } => exit::CONSISTENCY,
            },
            CliError::Input(_) => exit::INVALID_INPUT,
            CliError::Consistency(_) => exit::CONSISTENCY,
            CliError::Io { .. } => exit::IO,
        }
    }
}
