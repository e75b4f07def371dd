use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input (bad lengths, out-of-range values).
    #[error("invalid input: {0}")]
    Input(String),

    /// The request exceeds what the exact enumerators or the simulator can handle.
    #[error("capability exceeded: {0}")]
    Capability(String),

    /// A requested object does not exist (e.g. no cut with the asked value).
    #[error("not found: {0}")]
    NotFound(String),

    /// Invalid configuration for a sparsifier, optimizer or experiment.
    #[error("configuration error: {0}")]
    Config(String),

    /// A numerical routine hit a non-finite value.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
