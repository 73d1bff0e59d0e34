use thiserror::Error;

/// Errors raised by the decomposition library.
///
/// Variants are grouped by how a caller should react to them; the CLI maps
/// each group onto its own exit code.
#[derive(Debug, Error)]
pub enum PirdError {
    /// A caller-supplied value violates a precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The request exceeds what the library supports (e.g. lattice size).
    #[error("unsupported: {0}")]
    Capability(String),

    /// A computation hit a singular or non-finite intermediate.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The model is not stable enough for the requested operation.
    #[error("unstable model: {0}")]
    Instability(String),

    /// Model identification failed (rank deficiency, ill conditioning).
    #[error("estimation failed: {0}")]
    Estimation(String),

    /// Malformed input file.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for PirdError {
    fn from(err: serde_json::Error) -> Self {
        PirdError::Format(err.to_string())
    }
}

impl From<csv::Error> for PirdError {
    fn from(err: csv::Error) -> Self {
        match err.into_kind() {
            csv::ErrorKind::Io(io) => PirdError::Io(io),
            other => PirdError::Format(format!("{other:?}")),
        }
    }
}

pub type Result<T, E = PirdError> = std::result::Result<T, E>;
