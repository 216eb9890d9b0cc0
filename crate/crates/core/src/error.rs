use thiserror::Error;

/// Errors raised by the library. Messages name the violated condition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parity undefined for non-selfdual symbol `{0}`")]
    NotSelfdual(String),
    #[error("dual symbol unknown for `{0}`")]
    DualUnknown(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid segment: {0}")]
    InvalidSegment(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("catalog error: {0}")]
    Catalog(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("epsilon undefined: {0}")]
    EpsilonUndefined(String),
    #[error("invalid triple: {}", .0.join("; "))]
    InvalidTriple(Vec<String>),
    #[error("step {index}: {source}")]
    Step { index: usize, source: Box<Error> },
    #[error("term count {count} exceeds limit {limit}")]
    TooManyTerms { count: usize, limit: usize },
    #[error("criterion undetermined: {0}")]
    Undetermined(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn pre<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
