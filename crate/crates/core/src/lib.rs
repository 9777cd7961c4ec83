//! Exact solvers and certified instance generators for the `k x r` grid graph
//! embedding problem.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: graphs, components, small-graph isomorphism, necessary filters.
//! * [`embedding`]: embeddings, validation, distance approximation, glue algebra.
//! * [`oracle`]: exhaustive reference solvers.
//! * [`snapshot`]: the block/snapshot solver parameterized by `mcc + k`.
//! * [`distance`]: the column-sweep solver parameterized by `a_G + k`.
//! * [`tree`]: split vertices, `(P,t)`-paths and the composition solver for trees.
//! * [`reductions`]: hardness reductions as certified generators, strip packing.

pub mod distance;
pub mod embedding;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod reductions;
pub mod snapshot;
pub mod tree;

pub use embedding::{Cell, Direction, GridEmbedding};
pub use error::{GridError, Result};
pub use graph::Graph;
pub use oracle::{Answer, SolveResult, SolveStats};
