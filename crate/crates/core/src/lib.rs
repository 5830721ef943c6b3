//! Multiple-graph regularized ranking.
//!
//! A database of labeled feature vectors is turned into a pool of k-NN
//! graphs under several weighting schemes. Offline, a convex combination of
//! the pool's Laplacians is learned from the labels by alternating between
//! ranking scores and graph weights. Online, an outside query is attached to
//! every graph and the database is ranked by solving one regularized linear
//! system over the combined Laplacian.
//!
//! ```no_run
//! use multig_rank::dataset::{generate_synthetic, relevance_matrix, SyntheticParams};
//! use multig_rank::graph::{build_pool, GraphSpec, Scheme};
//! use multig_rank::ranker::{rank_online, train_offline, HyperParams};
//!
//! let db = generate_synthetic(&SyntheticParams {
//!     n_classes: 3, per_class: 20, dim: 8, spread: 1.0, separation: 5.0, seed: 1,
//! }).unwrap();
//! let pool = build_pool(&db, &[GraphSpec::gaussian(5, 4.0), GraphSpec::new(Scheme::Cosine, 5)]).unwrap();
//! let params = HyperParams::default();
//! let model = train_offline(&pool, &relevance_matrix(&db, 1).unwrap(), &params).unwrap();
//! let ranked = rank_online(&model, &pool, &db, "q", db.features(0), &params).unwrap();
//! println!("top hit: {}", db.records()[ranked.order[0]].id);
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod graph;
pub mod linalg;
pub mod ranker;

pub use error::{Error, ErrorKind, Result};
