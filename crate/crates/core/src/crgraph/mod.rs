//! Global item co-occurrence graph and hop-level collaborative relations.
//!
//! Every training sequence contributes a clique over its distinct items;
//! the union of those cliques is the global graph. Two distinct items have
//! relation `Hop(h)` when their shortest path has `h + 1` edges and
//! `h < max_hop`, `Others` when they are connected further apart, and
//! `Disconnected` when no path exists.

mod bfs;
mod cache;
mod class;
mod graph;
mod histogram;

pub use bfs::{bfs_frontiers, cr_between, BfsScratch, CrResolver};
pub use cache::{read_graph, write_graph};
pub use class::{ClassCounts, CrClass};
pub use graph::{build_global_graph, build_global_graph_with_cap, GlobalGraph, DEFAULT_CLIQUE_CAP};
pub use histogram::{
    cooc_frequency_histogram, pair_class_histogram, pair_class_histogram_by_frontiers,
    CoocHistogram, CrHistogram, PercentBase,
};

/// Default number of explicit hop classes (`Hop(0)..Hop(3)`).
pub const DEFAULT_MAX_HOP: usize = 4;
