use std::path::PathBuf;

/// Errors raised by the solver, the verifier and the I/O layer.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    Domain(String),

    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    Shape { expected: Vec<usize>, got: Vec<usize> },

    #[error("fields live on different domains")]
    DomainMismatch,

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid parameter `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("blow-up at t = {t}: {reason}")]
    BlowUp { t: f64, reason: String },

    #[error("corrupt snapshot {path}: {reason}")]
    CorruptSnapshot { path: PathBuf, reason: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("sweep aborted at epsilon = {epsilon}: {reason}")]
    SweepAborted { epsilon: f64, reason: String },
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Shape { .. } => "shape",
            Error::DomainMismatch => "domain-mismatch",
            Error::BasisMismatch(_) => "basis-mismatch",
            Error::Argument(_) => "argument",
            Error::Validation { .. } => "validation",
            Error::Parse { .. } => "parse",
            Error::BlowUp { .. } => "blow-up",
            Error::CorruptSnapshot { .. } => "corrupt-snapshot",
            Error::Dimension(_) => "dimension",
            Error::Io { .. } => "io",
            Error::SweepAborted { .. } => "sweep-aborted",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
