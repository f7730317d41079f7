use thiserror::Error;

/// Errors raised across the toolkit.
///
/// The variants group into the exit-code classes used by the command-line
/// front end: bad input, malformed files, and numerical-integrity failures.
#[derive(Debug, Error)]
pub enum QsvError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("operator is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("not a valid verification operator: {0}")]
    NotVerificationOperator(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("state never occurs: {0}")]
    StateNeverOccurs(String),

    #[error("unverifiable: {0}")]
    Unverifiable(String),

    #[error("cannot reject the null hypothesis: {0}")]
    CannotReject(String),

    #[error("divergent overhead: {0}")]
    DivergentOverhead(String),

    #[error("numerical integrity: {0}")]
    NumericalIntegrity(String),

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl QsvError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        QsvError::InvalidInput(msg.into())
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        QsvError::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, QsvError>;
