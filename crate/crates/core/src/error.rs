use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("arity {arity} exceeds the cap of {cap}")]
    ArityTooLarge { arity: usize, cap: usize },

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown function name `{0}`")]
    UnknownName(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("constant function: {0}")]
    ConstantFunction(String),

    #[error("selector is not compatible with the function")]
    IncompatibleSelector,

    #[error("precondition violated at node {node:?}: {reason}")]
    Precondition { node: Vec<usize>, reason: String },

    #[error("hypergraph has an empty edge")]
    EmptyEdge,

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("certificate failed validation: {0}")]
    Certificate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
