use thiserror::Error;

pub type Result<T> = std::result::Result<T, DecoError>;

#[derive(Debug, Error)]
pub enum DecoError {
    #[error("config parse error: {0}")]
    Parse(String),

    #[error("missing required key `{0}`")]
    MissingKey(String),

    #[error("invalid model:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("normal modes required: {0}")]
    RequiresNormalModes(String),

    #[error("normalization error: {0}")]
    Normalization(String),

    #[error("basis index {index} out of range for {n_qubits} qubits")]
    BasisIndex { index: u64, n_qubits: usize },

    #[error("site {site} out of range for {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("misuse: {0}")]
    Misuse(String),

    #[error("spectral error: {0}")]
    Spectral(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("state does not match class {class}: {reason}")]
    StateClassMismatch { class: String, reason: String },

    #[error("dimension {dim} exceeds limit {limit}")]
    Dimension { dim: usize, limit: usize },

    #[error("fit window empty: {0}")]
    FitWindow(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl DecoError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        DecoError::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures that originate in configuration or usage rather
    /// than in the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            DecoError::Parse(_)
                | DecoError::MissingKey(_)
                | DecoError::Validation(_)
                | DecoError::Misuse(_)
                | DecoError::StateClassMismatch { .. }
                | DecoError::BasisIndex { .. }
                | DecoError::SiteOutOfRange { .. }
                | DecoError::Normalization(_)
                | DecoError::Io { .. }
                | DecoError::Unsupported(_)
        )
    }
}
