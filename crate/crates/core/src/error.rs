use thiserror::Error;

/// Errors produced by the graph algorithms, oracles and harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("edge {0} is a self-loop")]
    SelfLoop(usize),
    #[error("arc {0} is not contractible")]
    NotContractible(usize),
    #[error("instance too large for brute force: {edges} edges (limit {limit})")]
    TooLarge { edges: usize, limit: usize },
    #[error("target {to} is unreachable from {from}")]
    Unreachable { from: usize, to: usize },
    #[error("optimum is zero")]
    ZeroOptimum,
    #[error("degenerate shape: {0}")]
    DegenerateShape(String),
    #[error("support too large: {0} outcomes")]
    SupportTooLarge(usize),
    #[error("LP solver did not converge after {iterations} sweeps (violation {violation:e}, slackness {slackness:e})")]
    NoConvergence {
        iterations: usize,
        violation: f64,
        slackness: f64,
    },
    #[error("malformed walk: {0}")]
    MalformedWalk(String),
    #[error("invalid edge {0}")]
    InvalidEdge(usize),
    #[error("invalid vertex {0}")]
    InvalidVertex(usize),
    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
