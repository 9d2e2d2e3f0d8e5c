use thiserror::Error;

/// Error type shared by all simulation modules.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("fit failed to converge (residual {residual:.3e}): {detail}")]
    FitFailure { residual: f64, detail: String },

    #[error("resource limit: {detail} (required {required} samples)")]
    Resource { required: usize, detail: String },

    #[error("too few counts: {0}")]
    LowCounts(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("serialization error: {0}")]
    Serialize(#[from] serde_json::Error),
}

impl CoreError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CoreError::InvalidInput(msg.into())
    }

    /// Stable machine-parseable reason code, used for CLI exit status mapping.
    pub fn reason_code(&self) -> &'static str {
        match self {
            CoreError::InvalidInput(_) => "invalid_input",
            CoreError::Config(_) => "config",
            CoreError::DegenerateFit(_) => "degenerate_fit",
            CoreError::FitFailure { .. } => "fit_failure",
            CoreError::Resource { .. } => "resource",
            CoreError::LowCounts(_) => "low_counts",
            CoreError::Io(_) => "io",
            CoreError::Parse(_) => "parse",
            CoreError::Serialize(_) => "serialize",
        }
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
