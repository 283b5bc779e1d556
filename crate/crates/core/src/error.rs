use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error category, used by the command line to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// A caller broke a documented precondition (bad `k`, empty input, ...).
    Contract,
    /// Input data failed validation or parsing.
    Validation,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("sequence '{id}': illegal residue '{residue}' at position {position}")]
    IllegalResidue {
        id: String,
        position: usize,
        residue: char,
    },

    #[error("sequence '{id}' has length {len}, shorter than the window size {window}")]
    TooShort {
        id: String,
        len: usize,
        window: usize,
    },

    #[error("structure '{id}' has no matching sequence")]
    UnknownStructure { id: String },

    #[error(
        "structure '{id}' has length {structure_len} but its sequence has length {sequence_len}"
    )]
    LengthMismatch {
        id: String,
        sequence_len: usize,
        structure_len: usize,
    },

    #[error("sequence '{id}' has no structure annotation")]
    MissingStructure { id: String },

    #[error("{0}")]
    Validation(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("non-finite fitness for particle {particle} at iteration {iteration}")]
    NonFiniteFitness { particle: usize, iteration: usize },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Contract(_) | Error::NonFiniteFitness { .. } => ErrorKind::Contract,
            _ => ErrorKind::Validation,
        }
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
