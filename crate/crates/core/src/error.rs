//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input in {0}")]
    NonFinite(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("orbit diverged at node {node}, step {step}: |component| > {bound:e}")]
    Divergence { node: usize, step: usize, bound: f64 },

    #[error("basis function `{name}` has a pole at row {row}: |denominator| < {eps:e}")]
    Pole { name: String, row: usize, eps: f64 },

    #[error("edge list line {line}: {msg}")]
    EdgeList { line: usize, msg: String },

    #[error("degenerate network: {0}")]
    DegenerateNetwork(String),

    #[error("empty graph")]
    EmptyGraph,

    #[error("model classification impossible: {0}")]
    ClassificationImpossible(String),

    #[error("low-degree/hub separation failed: {0}")]
    Separability(String),

    #[error("coupling unidentifiable: {0}")]
    CouplingUnidentifiable(String),

    #[error("{rate} undefined: {why}")]
    UndefinedRate { rate: &'static str, why: String },

    #[error("unsupported Laplacian spectrum: {0}")]
    UnsupportedSpectrum(String),

    #[error("solver error: {0}")]
    Solver(String),

    #[error("node {node}: {source}")]
    Node { node: usize, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
