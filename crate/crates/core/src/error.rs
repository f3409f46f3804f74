use thiserror::Error;

/// Errors raised by the symbolic, trace and Stein layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Operands built over different generator systems, or shapes that do not line up.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("degree {degree} exceeds the cap of {cap} indeterminate letters")]
    DegreeCap { degree: usize, cap: usize },

    #[error("unknown letter: {0}")]
    UnknownLetter(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    /// A model, graph or report spec failed validation; `field` names the offending entry.
    #[error("invalid spec field `{field}`: {message}")]
    Spec { field: String, message: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn spec(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Spec {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Validation errors map to CLI exit code 2; everything else is a runtime failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Structural(_)
                | Error::DegreeCap { .. }
                | Error::UnknownLetter(_)
                | Error::Parse { .. }
                | Error::Spec { .. }
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
