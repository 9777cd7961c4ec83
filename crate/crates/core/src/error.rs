//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors reported by graph construction, embedding algebra, solvers and generators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph is not a tree")]
    NotATree,
    #[error("vertex {0} is not mapped by the embedding")]
    UnmappedVertex(usize),
    #[error("vertices {0} and {1} are not at grid distance 1")]
    NotUnitDistance(usize, usize),
    #[error("cannot join a vertex with itself ({0})")]
    SelfJoin(usize),
    #[error("embeddings {0} and {1} do not agree")]
    Disagreement(usize, usize),
    #[error("glue requires a nonempty shared vertex set")]
    EmptyShared,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("placement is not correct and safe")]
    PlacementNotCorrectSafe,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("assignment does not satisfy every clause in the not-all-equal sense")]
    NotNaeSatisfying,
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("flow is inconsistent: {0}")]
    InconsistentFlow(String),
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, GridError>;
