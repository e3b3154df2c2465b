use thiserror::Error;

/// Errors raised across the crate.
///
/// Variants are grouped by the exit-code class the CLI maps them to:
/// parameter and domain problems are configuration errors, everything
/// numerical is a numerical error.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    Parameter { field: String, reason: String },

    #[error("degenerate geometry in triangle {triangle}: {reason}")]
    Geometry { triangle: usize, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("constraint error: {0}")]
    Constraint(String),

    #[error("solver did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("metric not positive at triangle {triangle} (factor {factor:.6e})")]
    Positivity { triangle: usize, factor: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("level {level}: {source}")]
    AtLevel {
        level: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("resource error: {0}")]
    Resource(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn at_level(self, level: usize) -> Self {
        Error::AtLevel {
            level,
            source: Box::new(self),
        }
    }

    /// True when the error originates in configuration or inputs rather than arithmetic.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Parameter { .. }
            | Error::Domain(_)
            | Error::Constraint(_)
            | Error::Precondition(_)
            | Error::InsufficientData(_)
            | Error::Format(_)
            | Error::Json(_) => true,
            Error::AtLevel { source, .. } => source.is_config(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
