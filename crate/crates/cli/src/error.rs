use std::path::{Path, PathBuf};

use psomotif::ErrorKind;

pub const EXIT_CONTRACT: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// A library error while reading the named input.
    #[error("{}: {source}", path.display())]
    Input {
        path: PathBuf,
        source: psomotif::Error,
    },
    #[error(transparent)]
    Core(#[from] psomotif::Error),
    #[error("config {}: {message}", path.display())]
    Config { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> CliError {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        let kind = |e: &psomotif::Error| match e.kind() {
            ErrorKind::Contract => EXIT_CONTRACT,
            ErrorKind::Validation => EXIT_VALIDATION,
        };
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Input { source, .. } => kind(source),
            CliError::Core(e) => kind(e),
            CliError::Config { .. } | CliError::Invalid(_) => EXIT_VALIDATION,
            CliError::Usage(_) => EXIT_USAGE,
        }
    }
}
