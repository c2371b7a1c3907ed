//! Rainbow subgraph search in properly edge-colored graphs.
//!
//! The crate builds the GF(2)^s colorings and a few small 1-factorizations,
//! searches them exhaustively for rainbow trees, paths and cycles, solves the
//! stick-sequence problem over GF(2)^d, enumerates proper colorings of small
//! complete graphs up to relabeling, and bundles the checked statements into
//! a claim registry.

pub mod algebra;
pub mod constructions;
pub mod ecgraph;
pub mod explorer;
pub mod patterns;
pub mod rainbow;
pub mod verify;

pub use constructions::{ConstructionKind, ConstructionSpec};
pub use ecgraph::{ColorId, ColoredEdge, ColoredGraph, GraphError, VertexId};
pub use patterns::{CanonicalCode, PatternError, TreePattern};
pub use rainbow::{Embedding, RainbowError, SearchBudget, SearchOptions, SearchOutcome, SearchResult};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Rainbow(#[from] RainbowError),
    #[error(transparent)]
    Algebra(#[from] algebra::AlgebraError),
    #[error(transparent)]
    Explorer(#[from] explorer::ExplorerError),
}
