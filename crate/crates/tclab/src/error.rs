use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("indeterminate sign: the zero polynomial has no sign")]
    IndeterminateSign,
    #[error("empty interval [{0}, {1}]")]
    EmptyInterval(String, String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownName(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("unbounded or empty polytope: {0}")]
    BadPolytope(String),
    #[error("point is not strictly interior: {0}")]
    NotInterior(String),
    #[error("not a metric point: {0}")]
    NotMetricPoint(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("singular linear system: {0}")]
    Singular(String),
    #[error("positivity failure: {0}")]
    Positivity(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("inconsistent Einstein data: {0}")]
    Inconsistent(String),
    #[error("rejected: {0}")]
    Rejected(String),
    #[error("not found in range: {0}")]
    NotFound(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("side is not degenerate: {0}")]
    NotDegenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
