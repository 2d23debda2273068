//! Forts, zero forcing and related parameters on graphs, with hypercube
//! specializations.

pub mod cache;
pub mod constructions;
pub mod error;
pub mod forcing;
pub mod forts;
pub mod graph;
pub mod lp;
pub mod search;
pub mod symmetry;
pub mod verify;
pub mod vertex_set;

pub use error::{Error, Result};
pub use forts::FortCensus;
pub use graph::Graph;
pub use vertex_set::VertexSet;
