use crate::tree::Vertex;
use thiserror::Error;

/// Errors raised by the library and the command-line front end.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
    #[error("vertices {0} and {1} are not adjacent")]
    NotAdjacent(Vertex, Vertex),
    #[error("expected distinct vertices, got {0} twice")]
    SameVertex(Vertex),
    #[error("generator set is empty")]
    EmptyGenerators,
    #[error("malformed tree: {0}")]
    MalformedTree(String),
    #[error("malformed structure: {0}")]
    MalformedStructure(String),
    #[error("malformed decoration at vertex {vertex}: {reason}")]
    MalformedDecoration { vertex: Vertex, reason: String },
    #[error("signatures differ")]
    SignatureMismatch,
    #[error("map is not an embedding: {0}")]
    NotEmbedding(String),
    #[error("alphabet must have at least 2 elements, got {0}")]
    AlphabetTooSmall(usize),
    #[error("invalid coloring: {0}")]
    InvalidColoring(String),
    #[error("invalid sigma: {0}")]
    InvalidSigma(String),
    #[error("not a tree automorphism: {0}")]
    NotAutomorphism(String),
    #[error("arrow undefined: no copies of the colored structure in the target")]
    EmptyArrow,
    #[error("no monochromatic copy exists")]
    SearchExhausted,
    #[error("budget of {budget} search nodes exhausted without a verdict")]
    Inconclusive { budget: u64 },
    #[error("rooted sub-arrow fails at level {level}: {reason}")]
    SubArrowFailed { level: usize, reason: String },
    #[error("order is not converging (witness {0:?})")]
    NotConverging(Vec<Vertex>),
    #[error("order is not a convex converging order")]
    NotCclo,
    #[error("tree has {size} vertices, enumeration bound is {bound}")]
    BoundExceeded { size: usize, bound: usize },
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
