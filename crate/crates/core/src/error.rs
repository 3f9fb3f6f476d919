use thiserror::Error;

/// Errors produced by the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid edge {0}-{1} for n={2}")]
    InvalidEdge(usize, usize, usize),
    #[error("n={0}: K_n has {1} edges, a zero-sum labeling needs an even count")]
    Parity(usize, usize),
    #[error("divisibility: {0}")]
    Divisibility(String),
    #[error("bad pattern spec: {0}")]
    Spec(String),
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("search space too large: {0}")]
    TooLarge(String),
    #[error("no copy straddling zero found after {0} restarts")]
    SearchExhausted(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not a path factor: {0}")]
    NotAFactor(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
