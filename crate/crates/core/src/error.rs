use thiserror::Error;

/// Errors raised by the analysis kernels.
///
/// The `Display` form of each variant starts with a stable kebab-case tag
/// (`empty-sample`, `schema-violation`, ...) that the CLI and the Python
/// bindings surface verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty-sample: {0}")]
    EmptySample(String),

    #[error("degenerate-variance: {0}")]
    DegenerateVariance(String),

    #[error("length-mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid-parameter: {0}")]
    InvalidParameter(String),

    #[error("not-positive-definite: {0}")]
    NotPositiveDefinite(String),

    #[error("not-positive-semidefinite: {0}")]
    NotPositiveSemidefinite(String),

    #[error("non-finite: {0}")]
    NonFinite(String),

    #[error("singular segment: {0}")]
    SingularSegment(String),

    #[error("singular-matrix: {0}")]
    SingularMatrix(String),

    #[error("rank-deficient: term `{0}` is collinear with earlier terms")]
    RankDeficient(String),

    #[error("schema-violation: {0}")]
    SchemaViolation(String),

    #[error("parse-error: row {row}, column `{column}`: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("unknown-label: `{0}` is not in the domain")]
    UnknownLabel(String),

    #[error("domain-mismatch: {0}")]
    DomainMismatch(String),

    #[error("not-normalized: {0}")]
    NotNormalized(String),

    #[error("unknown-column: `{0}`")]
    UnknownColumn(String),

    #[error("too-few-windows: need at least {needed}, got {got}")]
    TooFewWindows { needed: usize, got: usize },

    #[error("diverged at t = {time}: {message}")]
    Diverged { time: f64, message: String },

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
