//! Distributed centrality computation on directed graphs.
//!
//! Degree, closeness and tree betweenness come from a synchronous level-set
//! protocol. PageRank is computed by a randomized row-action (Kaczmarz type)
//! solver whose active row is chosen by a random surfer, with or without
//! knowledge of the network size, on static or temporal graphs. Exact
//! centralized oracles are included for checking.

pub mod centrality;
pub mod distributed;
pub mod error;
pub mod generate;
pub mod graph;
pub mod kaczmarz;
pub mod levelset;
pub mod oracle;
pub mod pagerank;
pub mod sparse;
pub mod surfer;
pub mod temporal;
pub mod trace;

pub use centrality::{CentralityKind, CentralityTable, CentralityVector};
pub use error::{Error, ErrorClass, Result};
pub use graph::{DanglingPolicy, DirectedGraph, NodeId};
pub use sparse::SparseColumnMatrix;
