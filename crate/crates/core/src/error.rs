use thiserror::Error;

use crate::vertex_set::VertexSet;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("hypercube dimension {d} outside 1..={max}")]
    DimensionOutOfRange { d: usize, max: usize },

    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("graph with {n} vertices exceeds the limit of {limit} for {what}")]
    GraphTooLarge {
        n: usize,
        limit: usize,
        what: &'static str,
    },

    #[error("{candidates} candidates exceed the budget of {budget}")]
    BudgetExceeded { candidates: u128, budget: u128 },

    #[error("graph is not bipartite (odd cycle {cycle:?})")]
    NotBipartite { cycle: Vec<usize> },

    #[error("set is not a fort")]
    NotAFort,

    #[error("set is not a zero forcing set; closure stalls at {stalled:?}")]
    NotZeroForcing { stalled: VertexSet },

    #[error("fort census is incomplete")]
    IncompleteCensus,

    #[error("precondition failed: {}", failed.join("; "))]
    Precondition { failed: Vec<String> },

    #[error("internal consistency violation: {0}")]
    InternalConsistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
