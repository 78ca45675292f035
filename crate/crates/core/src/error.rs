use thiserror::Error;

/// Errors raised by the solvers and their inputs.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The feasible family (or a cover target / budget) admits no solution.
    #[error("infeasible {what}: {reason}")]
    Infeasible { what: String, reason: String },

    /// A numeric or structural parameter is out of range.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: String, reason: String },

    /// An operation was called outside its precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The input is degenerate for the requested quantity (zero denominators, constant components).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The instance exceeds a hard size cap.
    #[error("refused: {0}")]
    TooLarge(String),

    /// File or schema problems; `field` names the offending path when known.
    #[error("schema error at `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn infeasible(what: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Infeasible {
            what: what.into(),
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag used in error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Infeasible { .. } => "infeasible",
            Error::Parameter { .. } => "parameter",
            Error::Precondition(_) => "precondition",
            Error::Degenerate(_) => "degenerate",
            Error::TooLarge(_) => "too_large",
            Error::Schema { .. } => "schema",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
