//! Expanding search on rooted edge-weighted graphs: exact branch-and-cut,
//! a greedy approximation built on prize-collecting Steiner trees, spanning
//! tree local search and brute-force oracles.

pub mod bnc;
pub mod error;
pub mod flow;
pub mod graph;
pub mod greedy;
pub mod io;
pub mod local_search;
pub mod oracle;
pub mod pcst;
pub mod tree_seq;

pub use error::{Error, Result, SearchViolation};
pub use graph::{
    contract, fundamental_cycle, metric_closure, search_cost, Contraction, Edge, ExpandingSearch, Instance,
    MetricClosure, RootedTree, Vertex, ROOT,
};
