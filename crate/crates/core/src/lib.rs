//! Labeled graphs as `n(n-1)/2`-bit strings, and the statistics that high
//! complexity strings force on them: block and subgraph frequencies,
//! diameter, connectivity, clique size, automorphism groups and the number
//! of unlabeled graphs.
//!
//! Every bound evaluator is paired with something you can actually count:
//! exhaustive enumeration at small `n`, seeded Monte Carlo at larger `n`.

pub mod census;
pub mod enumeration;
pub mod error;
pub mod exec;
mod flow;
pub mod formats;
pub mod graph;
pub mod incompress;
pub mod report;
pub mod topology;

pub use error::{Error, Result};
pub use exec::Exec;
pub use graph::{edge_index, Graph, PatternGraph, Permutation};
