use thiserror::Error;

use crate::instance::{EdgeId, VertexId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("instance has no vertices")]
    NoVertices,
    #[error("terminal {0} is not a vertex")]
    BadTerminal(VertexId),
    #[error("edge {0}: duplicate edge id")]
    DuplicateEdgeId(EdgeId),
    #[error("edge {0}: edge ids must be dense in 0..edge_count")]
    NonDenseEdgeId(EdgeId),
    #[error("edge {edge}: endpoint {vertex} out of range")]
    BadEndpoint { edge: EdgeId, vertex: VertexId },
    #[error("edge {0}: negative weight")]
    NegativeWeight(EdgeId),
    #[error("edge {0}: total edge cost would overflow 63 bits")]
    OverflowRisk(EdgeId),
    #[error("unknown edge id {0}")]
    UnknownEdgeId(EdgeId),

    #[error("scenario space too large: {count} scenarios exceed cap {cap}")]
    ScenarioSpaceTooLarge { count: u128, cap: u128 },
    #[error("configuration space too large: estimated {estimate} configurations exceed cap {cap}")]
    ConfigurationSpaceTooLarge { estimate: u128, cap: u128 },
    #[error("instance too large for the exact LP: {variables} variables exceed cap {cap}")]
    TooLargeForExactLP { variables: u128, cap: u128 },
    #[error("instance too large for the oracle: {edges} edges exceed cap {cap}")]
    InstanceTooLargeForOracle { edges: usize, cap: usize },

    #[error("instance is infeasible")]
    Infeasible,
    #[error("flow of the requested amount is infeasible (max achievable {max_achievable})")]
    FlowInfeasible { max_achievable: i64 },
    #[error("solver requires k = {expected}, got k = {got}")]
    WrongBudget { expected: usize, got: usize },
    #[error("solver requires a directed instance")]
    RequiresDirected,
    #[error("solver requires an undirected instance")]
    RequiresUndirected,
    #[error("graph is not acyclic (cycle through vertices {0:?})")]
    NotADag(Vec<VertexId>),
    #[error("graph is not series-parallel (irreducible remainder: {0})")]
    NotSeriesParallel(String),
    #[error("decomposition tree does not match the instance: {0}")]
    TreeMismatch(String),
    #[error("candidate is not a feasible solution")]
    NotFeasible,
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("network is invalid: {0}")]
    InvalidNetwork(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// True for the errors raised when a configured size cap is exceeded.
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(
            self,
            Error::ScenarioSpaceTooLarge { .. }
                | Error::ConfigurationSpaceTooLarge { .. }
                | Error::TooLargeForExactLP { .. }
                | Error::InstanceTooLargeForOracle { .. }
        )
    }
}
