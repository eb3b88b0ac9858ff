use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph is empty")]
    EmptyGraph,

    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("key {0} is not present in the queue")]
    KeyAbsent(usize),

    #[error("dense size cap exceeded: 2m = {size} > {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("ill-conditioned eigenbasis: {0}")]
    Conditioning(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("graph generation failed: {0}")]
    Generation(String),

    #[error("degenerate spectrum (lambda1 = {lambda1}); the graph needs a 2-core that is not a union of cycles")]
    DegenerateSpectrum { lambda1: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
