//! Graph-regularized ranking: the single-graph solve, offline learning of
//! graph weights, and online ranking of outside queries.

mod grank;
mod offline;
mod online;
mod params;
mod simplex;

pub use grank::{grank_solve, grank_solve_with};
pub use offline::{
    graph_smoothness, mu_from_smoothness, mu_update, objective, offline_f_update, offline_f_update_with, train_offline,
    RankModel, MODEL_FORMAT_VERSION,
};
pub use online::{rank_online, rank_pairwise_baseline, OnlineRanker, RankedList};
pub use params::{GraphWeights, HyperParams};
pub use simplex::project_to_simplex;
