use std::fmt::Write as _;

use super::offline::RankModel;
use super::params::{GraphWeights, HyperParams};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::graph::{combine_laplacians, cosine, extend_graph, BaseGraph, GraphPool};
use crate::linalg::SolverOptions;

/// Database scores for one query, with the descending order (ties by
/// ascending index).
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub query_id: String,
    pub scores: Vec<f64>,
    pub order: Vec<usize>,
}

impl RankedList {
    pub fn from_scores(query_id: impl Into<String>, scores: Vec<f64>) -> Result<Self> {
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::Singular("non-finite ranking score".into()));
        }
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        Ok(Self {
            query_id: query_id.into(),
            scores,
            order,
        })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// `rank\tid\tscore` lines with a header, ranks starting at 1.
    pub fn to_tsv(&self, db: &Dataset) -> String {
        let mut out = String::from("rank\tid\tscore\n");
        for (r, &i) in self.order.iter().enumerate() {
            let _ = writeln!(out, "{}\t{}\t{}", r + 1, db.records()[i].id, self.scores[i]);
        }
        out
    }
}

/// Ranks outside queries against a database with a fixed graph weighting.
///
/// Built once per (weights, pool, database); the binding checks run here so
/// per-query calls only extend graphs and solve.
pub struct OnlineRanker<'a> {
    weights: GraphWeights,
    pool: &'a GraphPool,
    db: &'a Dataset,
    alpha: f64,
    ridge: f64,
    opts: SolverOptions,
}

impl<'a> OnlineRanker<'a> {
    pub fn new(model: &RankModel, pool: &'a GraphPool, db: &'a Dataset, params: &HyperParams) -> Result<Self> {
        model.check_pool(pool)?;
        Self::with_weights(model.weights.clone(), pool, db, params)
    }

    /// Single-graph ranking with graph `index` of the pool.
    pub fn single_graph(index: usize, pool: &'a GraphPool, db: &'a Dataset, params: &HyperParams) -> Result<Self> {
        if index >= pool.len() {
            return Err(Error::InvalidParameter(format!(
                "graph index {index} out of range for a pool of {}",
                pool.len()
            )));
        }
        Self::with_weights(GraphWeights::one_hot(pool.len(), index), pool, db, params)
    }

    pub fn with_weights(
        weights: GraphWeights,
        pool: &'a GraphPool,
        db: &'a Dataset,
        params: &HyperParams,
    ) -> Result<Self> {
        pool.check_dataset(db)?;
        if weights.len() != pool.len() {
            return Err(Error::InvalidParameter("weights and pool size differ".into()));
        }
        if !(params.alpha >= 0.0 && params.alpha.is_finite()) || !(params.ridge >= 0.0 && params.ridge.is_finite()) {
            return Err(Error::InvalidParameter(
                "alpha and ridge must be finite and >= 0".into(),
            ));
        }
        Ok(Self {
            weights,
            pool,
            db,
            alpha: params.alpha,
            ridge: params.ridge,
            opts: SolverOptions::default(),
        })
    }

    pub fn with_solver(mut self, opts: SolverOptions) -> Self {
        self.opts = opts;
        self
    }

    /// Extended graphs for `x0` (query at index 0), skipping zero-weight
    /// graphs.
    pub fn extended_graphs(&self, x0: &[f64]) -> Result<Vec<(f64, BaseGraph)>> {
        self.weights
            .as_slice()
            .iter()
            .zip(self.pool.graphs())
            .filter(|(&mu, _)| mu > 0.0)
            .map(|(&mu, g)| Ok((mu, extend_graph(g, self.db, x0)?)))
            .collect()
    }

    /// Full `(N + 1)` score vector, query first.
    pub fn solve_extended(&self, x0: &[f64]) -> Result<Vec<f64>> {
        if x0.len() != self.db.dim() {
            return Err(Error::QueryDimension {
                expected: self.db.dim(),
                found: x0.len(),
            });
        }
        let ext = self.extended_graphs(x0)?;
        let n1 = self.db.len() + 1;
        let l = combine_laplacians(n1, ext.iter().map(|(mu, g)| (*mu, g)));
        let mut u = vec![0.0; n1];
        u[0] = 1.0;
        super::grank::grank_solve_with(&l, &u, &u, self.alpha, self.ridge, &self.opts)
    }

    pub fn rank(&self, query_id: &str, x0: &[f64]) -> Result<RankedList> {
        let mut f = self.solve_extended(x0)?;
        f.remove(0);
        RankedList::from_scores(query_id, f)
    }
}

/// Ranks the database against an outside query with learned graph weights.
pub fn rank_online(
    model: &RankModel,
    pool: &GraphPool,
    db: &Dataset,
    query_id: &str,
    x0: &[f64],
    params: &HyperParams,
) -> Result<RankedList> {
    OnlineRanker::new(model, pool, db, params)?.rank(query_id, x0)
}

/// Cosine similarity between the query and each database vector.
pub fn rank_pairwise_baseline(db: &Dataset, query_id: &str, x0: &[f64]) -> Result<RankedList> {
    if x0.len() != db.dim() {
        return Err(Error::QueryDimension {
            expected: db.dim(),
            found: x0.len(),
        });
    }
    if x0.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroVector { scheme: "cosine" });
    }
    let scores = db
        .records()
        .iter()
        .map(|r| cosine(x0, &r.features))
        .collect::<Result<Vec<_>>>()?;
    RankedList::from_scores(query_id, scores)
}
