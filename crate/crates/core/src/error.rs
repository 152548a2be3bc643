use thiserror::Error;

use crate::graph::Vertex;

/// Why an edge sequence is not an expanding search.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchViolation {
    #[error("edge {{{0}, {1}}} does not exist")]
    NotAnEdge(Vertex, Vertex),
    #[error("edge {{{0}, {1}}} touches no visited vertex")]
    Disconnected(Vertex, Vertex),
    #[error("edge {{{0}, {1}}} connects two visited vertices")]
    Revisit(Vertex, Vertex),
    #[error("vertex {0} out of range")]
    UnknownVertex(Vertex),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("vertex {vertex} out of range (instance has {count} vertices)")]
    VertexOutOfRange { vertex: Vertex, count: usize },
    #[error("edge {{{u}, {v}}} has non-positive or non-finite length {length}")]
    BadLength { u: Vertex, v: Vertex, length: f64 },
    #[error("probability {p} of vertex {vertex} outside [0, 1]")]
    BadProbability { vertex: Vertex, p: f64 },
    #[error("root probability must be 0, found {0}")]
    RootProbability(f64),
    #[error("probabilities sum to {0}, expected 1")]
    ProbabilitySum(f64),
    #[error("graph is disconnected: vertex {0} unreachable from the root")]
    Disconnected(Vertex),
    #[error("invalid expanding search at step {step}: {violation}")]
    InvalidSearch { step: usize, violation: SearchViolation },
    #[error("expanding search visits {visited} of {expected} vertices")]
    IncompleteSearch { visited: usize, expected: usize },
    #[error("nothing to contract: the set covers every vertex")]
    NothingToContract,
    #[error("contraction set must contain the root")]
    RootNotInSet,
    #[error("edge set is not a tree rooted at the root: {0}")]
    NotATree(String),
    #[error("edge {{{0}, {1}}} already belongs to the tree")]
    EdgeInTree(Vertex, Vertex),
    #[error("edge {{{0}, {1}}} has an endpoint outside the tree")]
    EdgeOutsideTree(Vertex, Vertex),
    #[error("invalid arc capacity {0}")]
    BadCapacity(f64),
    #[error("instance has {n} non-root vertices, above the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("undefined density: no vertex carries positive probability")]
    UndefinedDensity,
    #[error("epsilon must be positive, got {0}")]
    BadEpsilon(f64),
    #[error("infeasible generator request: {0}")]
    InfeasibleRequest(String),
    #[error("linear program could not be solved: {0}")]
    LpFailure(String),
    #[error("linear program: {0}")]
    Lp(#[from] expsearch_lp::LpError),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
