//! Graph representations, exact oracles and contraction.

pub mod contract;
pub mod directed;
pub mod io;
pub mod matching;
pub mod multigraph;
pub mod search;
pub mod walk;

pub use contract::{contract_edge, Contraction};
pub use directed::{contract_directed, Arc, DirectedContraction, DirectedGraph};
pub use matching::{
    exact_max_weight_matching, hungarian_bipartite, BipartiteMatching, BipartiteWeights, Matching,
};
pub use multigraph::{Edge, WeightVector, WeightedMultigraph};
pub use search::{
    bfs_dist, bfs_dist_to, bfs_path, dijkstra, kruskal_by_weights, kruskal_mst, walk_weight,
    Distances, HopGraph, ShortestPaths, SpanningTree,
};
pub use walk::{Step, Walk};
