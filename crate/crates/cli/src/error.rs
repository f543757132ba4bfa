use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Exit status for a completed run.
pub const EXIT_OK: u8 = 0;
/// A module failed while running.
pub const EXIT_EXECUTION: u8 = 1;
/// Bad flags, configuration or output directory.
pub const EXIT_USAGE: u8 = 2;
/// The run completed but some hypothesis check failed.
pub const EXIT_CONDITIONS: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    #[error("output directory {dir} holds files this tool did not write: {names}")]
    ForeignFiles { dir: PathBuf, names: String },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },

    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        source: sublin_core::Error,
    },
}

impl CliError {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. } | CliError::Parse { .. } | CliError::Validation { .. } | CliError::ForeignFiles { .. } => {
                EXIT_USAGE
            }
            CliError::Write { .. } | CliError::Stage { .. } => EXIT_EXECUTION,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
