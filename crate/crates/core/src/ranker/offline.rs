//! Supervised learning of graph weights by alternating minimization of
//!
//! `O(F, mu) = ||F - Y||_F^2 + alpha sum_m mu_m Tr(F^T L_m F) + beta ||mu||^2`
//!
//! over score matrices `F` and simplex-constrained weights `mu`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::params::{GraphWeights, HyperParams};
use super::simplex::project_to_simplex;
use crate::dataset::RelevanceMatrix;
use crate::error::{Error, Result};
use crate::graph::{combine_laplacians, GraphPool};
use crate::linalg::{SolverOptions, SpdSolver};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Output of offline training, consumed by online ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct RankModel {
    pub weights: GraphWeights,
    pub params: HyperParams,
    pub pool_fingerprint: String,
    /// Objective after each full `(F, mu)` update.
    pub objective_trace: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    mu: Vec<f64>,
    alpha: f64,
    beta: f64,
    #[serde(rename = "T")]
    t: usize,
    ridge: f64,
    pool_fingerprint: String,
    objective_trace: Vec<f64>,
}

impl RankModel {
    pub fn to_json(&self) -> Result<String> {
        let f = ModelFile {
            version: MODEL_FORMAT_VERSION,
            mu: self.weights.as_slice().to_vec(),
            alpha: self.params.alpha,
            beta: self.params.beta,
            t: self.params.max_iters,
            ridge: self.params.ridge,
            pool_fingerprint: self.pool_fingerprint.clone(),
            objective_trace: self.objective_trace.clone(),
        };
        Ok(serde_json::to_string_pretty(&f)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: ModelFile = serde_json::from_str(text)?;
        Self::from_file(f)
    }

    fn from_file(f: ModelFile) -> Result<Self> {
        if f.version != MODEL_FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported model version {}", f.version)));
        }
        let params = HyperParams {
            alpha: f.alpha,
            beta: f.beta,
            max_iters: f.t,
            ridge: f.ridge,
            tol: 0.0,
        };
        params.validate()?;
        Ok(Self {
            weights: GraphWeights::new(f.mu)?,
            params,
            pool_fingerprint: f.pool_fingerprint,
            objective_trace: f.objective_trace,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(self.to_json()?.as_bytes())?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f: ModelFile = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        Self::from_file(f)
    }

    pub fn check_pool(&self, pool: &GraphPool) -> Result<()> {
        if self.pool_fingerprint != pool.fingerprint() {
            return Err(Error::FingerprintMismatch {
                expected: self.pool_fingerprint.clone(),
                found: pool.fingerprint().to_owned(),
            });
        }
        if self.weights.len() != pool.len() {
            return Err(Error::InvalidParameter(format!(
                "model has {} graph weights but pool has {} graphs",
                self.weights.len(),
                pool.len()
            )));
        }
        Ok(())
    }
}

fn check_dims(pool: &GraphPool, mu: &GraphWeights, n: usize) -> Result<()> {
    if pool.n() != n {
        return Err(Error::InvalidParameter(format!(
            "pool has {} nodes, relevance matrix has {n}",
            pool.n()
        )));
    }
    if mu.len() != pool.len() {
        return Err(Error::InvalidParameter(format!(
            "{} graph weights for a pool of {}",
            mu.len(),
            pool.len()
        )));
    }
    Ok(())
}

/// `F = (I + alpha sum_m mu_m L_m)^{-1} Y`.
pub fn offline_f_update(pool: &GraphPool, mu: &GraphWeights, y: &RelevanceMatrix, alpha: f64) -> Result<DMatrix<f64>> {
    offline_f_update_with(pool, mu, &y.to_dense(), alpha, &SolverOptions::default())
}

pub fn offline_f_update_with(
    pool: &GraphPool,
    mu: &GraphWeights,
    y: &DMatrix<f64>,
    alpha: f64,
    opts: &SolverOptions,
) -> Result<DMatrix<f64>> {
    let n = y.nrows();
    check_dims(pool, mu, n)?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter("alpha must be finite and >= 0".into()));
    }
    let l = combine_laplacians(n, mu.as_slice().iter().copied().zip(pool.graphs()));
    let a = l.scaled_plus_diagonal(alpha, &vec![1.0; n]);
    SpdSolver::new(a, opts)?.solve_matrix(y)
}

/// `e_m = Tr(F^T L_m F)` for every graph of the pool.
pub fn graph_smoothness(pool: &GraphPool, f: &DMatrix<f64>) -> Vec<f64> {
    pool.graphs().par_iter().map(|g| g.trace_form(f)).collect()
}

/// Minimizer of `alpha e^T mu + beta ||mu||^2` over the simplex, i.e. the
/// projection of `-(alpha / (2 beta)) e`.
pub fn mu_from_smoothness(e: &[f64], alpha: f64, beta: f64) -> Result<GraphWeights> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter("beta must be > 0".into()));
    }
    let scale = -alpha / (2.0 * beta);
    let v: Vec<f64> = e.iter().map(|&x| scale * x).collect();
    GraphWeights::new(project_to_simplex(&v))
}

pub fn mu_update(pool: &GraphPool, f: &DMatrix<f64>, alpha: f64, beta: f64) -> Result<GraphWeights> {
    if f.nrows() != pool.n() {
        return Err(Error::InvalidParameter("score matrix and pool disagree on N".into()));
    }
    mu_from_smoothness(&graph_smoothness(pool, f), alpha, beta)
}

pub fn objective(
    f: &DMatrix<f64>,
    y: &DMatrix<f64>,
    smoothness: &[f64],
    mu: &GraphWeights,
    alpha: f64,
    beta: f64,
) -> f64 {
    let fit = (f - y).norm_squared();
    let smooth: f64 = smoothness.iter().zip(mu.as_slice()).map(|(e, m)| e * m).sum();
    fit + alpha * smooth + beta * mu.norm_squared()
}

/// Alternates F and mu updates from uniform weights for `params.max_iters`
/// rounds, or until the objective drops by less than `params.tol` when
/// `tol > 0`.
pub fn train_offline(pool: &GraphPool, y: &RelevanceMatrix, params: &HyperParams) -> Result<RankModel> {
    params.validate()?;
    let n = y.len();
    let m = pool.len();
    let mut mu = GraphWeights::uniform(m);
    check_dims(pool, &mu, n)?;
    let y = y.to_dense();
    let opts = SolverOptions::default();
    let mut trace = Vec::with_capacity(params.max_iters);
    for _ in 0..params.max_iters {
        let f = offline_f_update_with(pool, &mu, &y, params.alpha, &opts)?;
        let e = graph_smoothness(pool, &f);
        mu = mu_from_smoothness(&e, params.alpha, params.beta)?;
        let obj = objective(&f, &y, &e, &mu, params.alpha, params.beta);
        let stop = params.tol > 0.0 && trace.last().is_some_and(|&prev: &f64| prev - obj < params.tol);
        trace.push(obj);
        if stop {
            break;
        }
    }
    Ok(RankModel {
        weights: mu,
        params: *params,
        pool_fingerprint: pool.fingerprint().to_owned(),
        objective_trace: trace,
    })
}
