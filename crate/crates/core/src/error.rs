use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input violates a structural or value constraint.
    #[error("validation error: {0}")]
    Validation(String),

    /// A named algorithm or dataset does not exist.
    #[error("unknown {kind} '{name}'")]
    Lookup { kind: &'static str, name: String },

    /// Argument outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Data carries no information for the requested test (e.g. all paired
    /// differences are zero).
    #[error("degenerate data: {0}")]
    Degenerate(String),

    /// Exact null distribution requested above the supported size.
    #[error("exact distribution unavailable for n = {n} (limit {limit}); use the normal approximation")]
    ExactUnavailable { n: usize, limit: usize },

    /// Malformed input file.
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn algorithm(name: impl Into<String>) -> Self {
        Error::Lookup {
            kind: "algorithm",
            name: name.into(),
        }
    }

    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 3,
            Error::Validation(_)
            | Error::Lookup { .. }
            | Error::Domain(_)
            | Error::ExactUnavailable { .. } => 4,
            Error::Degenerate(_) => 5,
            Error::Io(_) => 6,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
