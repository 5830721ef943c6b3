use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    /// Weight of the graph smoothness penalty.
    pub alpha: f64,
    /// Weight of the `||mu||^2` regularizer on graph weights.
    pub beta: f64,
    /// Number of alternating iterations.
    pub max_iters: usize,
    /// `eps` in the online system `(U + alpha L + eps I) f = U y`.
    pub ridge: f64,
    /// Early stop when the objective decreases by less than this; 0 disables.
    pub tol: f64,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            max_iters: 20,
            ridge: 1e-8,
            tol: 0.0,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_owned()));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be > 0");
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad("beta must be > 0");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be >= 1");
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return bad("ridge must be >= 0");
        }
        if !(self.tol >= 0.0) {
            return bad("tol must be >= 0");
        }
        Ok(())
    }
}

/// Convex combination weights over the graphs of a pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GraphWeights(Vec<f64>);

impl GraphWeights {
    pub const SIMPLEX_TOL: f64 = 1e-10;

    pub fn new(mu: Vec<f64>) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::InvalidParameter("graph weights must be non-empty".into()));
        }
        if mu.iter().any(|&m| !(m >= 0.0) || !m.is_finite()) {
            return Err(Error::InvalidParameter("graph weights must be finite and >= 0".into()));
        }
        let s: f64 = mu.iter().sum();
        if (s - 1.0).abs() > Self::SIMPLEX_TOL {
            return Err(Error::InvalidParameter(format!("graph weights sum to {s}, not 1")));
        }
        Ok(Self(mu))
    }

    pub fn uniform(m: usize) -> Self {
        Self(vec![1.0 / m as f64; m])
    }

    pub fn one_hot(m: usize, index: usize) -> Self {
        let mut mu = vec![0.0; m];
        mu[index] = 1.0;
        Self(mu)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|m| m * m).sum()
    }
}
