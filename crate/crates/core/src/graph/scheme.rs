use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Edge weighting scheme of a k-NN graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Gaussian,
    DotProduct,
    Cosine,
    Jaccard,
    Tanimoto,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Gaussian,
        Scheme::DotProduct,
        Scheme::Cosine,
        Scheme::Jaccard,
        Scheme::Tanimoto,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Gaussian => "gaussian",
            Scheme::DotProduct => "dot_product",
            Scheme::Cosine => "cosine",
            Scheme::Jaccard => "jaccard",
            Scheme::Tanimoto => "tanimoto",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s || (s == "dot-product" && *sc == Scheme::DotProduct))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown weighting scheme {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub scheme: Scheme,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

impl GraphSpec {
    pub fn gaussian(k: usize, sigma: f64) -> Self {
        Self {
            scheme: Scheme::Gaussian,
            k,
            sigma: Some(sigma),
        }
    }

    pub fn new(scheme: Scheme, k: usize) -> Self {
        Self { scheme, k, sigma: None }
    }

    /// Checks parameter consistency and `1 <= k <= n - 1`.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 || self.k + 1 > n {
            return Err(Error::InvalidParameter(format!(
                "k = {} out of range for {n} nodes (need 1 <= k <= {})",
                self.k,
                n.saturating_sub(1)
            )));
        }
        match (self.scheme, self.sigma) {
            (Scheme::Gaussian, Some(s)) if s > 0.0 && s.is_finite() => Ok(()),
            (Scheme::Gaussian, _) => Err(Error::InvalidParameter("gaussian weighting requires sigma > 0".into())),
            (_, None) => Ok(()),
            (s, Some(_)) => Err(Error::InvalidParameter(format!(
                "sigma is only valid for gaussian, not {s}"
            ))),
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sigma {
            Some(s) => write!(f, "{}(k={}, sigma={s:.4})", self.scheme, self.k),
            None => write!(f, "{}(k={})", self.scheme, self.k),
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector { scheme: "cosine" });
    }
    Ok(dot(a, b) / (na * nb))
}

/// `sum(min) / sum(max)` over coordinates; both-zero inputs give 0.
pub fn generalized_jaccard(a: &[f64], b: &[f64]) -> Result<f64> {
    let mut lo = 0.0;
    let mut hi = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        if x < 0.0 || y < 0.0 {
            return Err(Error::NegativeFeature { scheme: "jaccard" });
        }
        lo += x.min(y);
        hi += x.max(y);
    }
    Ok(if hi > 0.0 { lo / hi } else { 0.0 })
}

/// `a.b / (|a|^2 + |b|^2 - a.b)`; both-zero inputs give 0.
pub fn tanimoto(a: &[f64], b: &[f64]) -> f64 {
    let ab = dot(a, b);
    let den = dot(a, a) + dot(b, b) - ab;
    if den > 0.0 {
        ab / den
    } else {
        0.0
    }
}

/// Neighbor-selection score: larger means closer. Gaussian and dot-product
/// graphs select by squared Euclidean distance, the others by their own
/// similarity.
pub(crate) fn selection_score(spec: &GraphSpec, a: &[f64], b: &[f64]) -> Result<f64> {
    match spec.scheme {
        Scheme::Gaussian | Scheme::DotProduct => Ok(-sq_dist(a, b)),
        Scheme::Cosine => cosine(a, b),
        Scheme::Jaccard => generalized_jaccard(a, b),
        Scheme::Tanimoto => Ok(tanimoto(a, b)),
    }
}

/// Weight of an edge between two feature vectors. Negative similarities
/// (dot-product, cosine and tanimoto on signed data) are clamped to 0 so
/// the resulting Laplacian stays positive semi-definite.
pub fn edge_weight(a: &[f64], b: &[f64], spec: &GraphSpec) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::QueryDimension {
            expected: a.len(),
            found: b.len(),
        });
    }
    let w = match spec.scheme {
        Scheme::Gaussian => {
            let sigma = spec
                .sigma
                .ok_or_else(|| Error::InvalidParameter("gaussian weighting requires sigma".into()))?;
            (-sq_dist(a, b) / (2.0 * sigma * sigma)).exp()
        }
        Scheme::DotProduct => dot(a, b),
        Scheme::Cosine => cosine(a, b)?,
        Scheme::Jaccard => generalized_jaccard(a, b)?,
        Scheme::Tanimoto => tanimoto(a, b),
    };
    Ok(w.max(0.0))
}

/// Rejects inputs a scheme cannot weight: negative entries for jaccard,
/// zero vectors for cosine.
pub(crate) fn check_vector(scheme: Scheme, x: &[f64]) -> Result<()> {
    match scheme {
        Scheme::Jaccard if x.iter().any(|&v| v < 0.0) => Err(Error::NegativeFeature { scheme: "jaccard" }),
        Scheme::Cosine if x.iter().all(|&v| v == 0.0) => Err(Error::ZeroVector { scheme: "cosine" }),
        _ => Ok(()),
    }
}
