//! k-NN graph construction under five weighting schemes, Laplacians, the
//! candidate pool, and the single-query extension used for online ranking.

mod base;
mod knn;
mod pool;
mod scheme;

pub use base::{build_graph, combine_laplacians, extend_graph, BaseGraph};
pub use knn::{knn_neighbors, query_neighbors};
pub use pool::{build_pool, grid_specs, median_pairwise_distance, GraphPool, POOL_FORMAT_VERSION};
pub use scheme::{cosine, edge_weight, generalized_jaccard, tanimoto, GraphSpec, Scheme};
