use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::base::{build_graph, BaseGraph};
use super::scheme::{sq_dist, GraphSpec, Scheme};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

pub const POOL_FORMAT_VERSION: u32 = 1;

/// Candidate base graphs over one dataset, bound to it by fingerprint.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphPool {
    graphs: Vec<BaseGraph>,
    fingerprint: String,
    n: usize,
    dim: usize,
}

impl GraphPool {
    pub fn new(graphs: Vec<BaseGraph>, fingerprint: String, dim: usize) -> Result<Self> {
        let n = graphs
            .first()
            .ok_or_else(|| Error::InvalidParameter("graph pool must contain at least one graph".into()))?
            .n();
        if graphs.iter().any(|g| g.n() != n) {
            return Err(Error::InvalidParameter("pool graphs have different node counts".into()));
        }
        Ok(Self {
            graphs,
            fingerprint,
            n,
            dim,
        })
    }

    pub fn graphs(&self) -> &[BaseGraph] {
        &self.graphs
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn specs(&self) -> Vec<GraphSpec> {
        self.graphs.iter().map(|g| *g.spec()).collect()
    }

    /// Errors unless `ds` is the dataset the pool was built from.
    pub fn check_dataset(&self, ds: &Dataset) -> Result<()> {
        let fp = ds.fingerprint();
        if fp != self.fingerprint {
            return Err(Error::FingerprintMismatch {
                expected: self.fingerprint.clone(),
                found: fp,
            });
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer(&mut w, &self.to_file())?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file: PoolFile = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        Self::from_file(file)
    }

    fn to_file(&self) -> PoolFile {
        PoolFile {
            version: POOL_FORMAT_VERSION,
            m: self.graphs.len(),
            n: self.n,
            d: self.dim,
            fingerprint: self.fingerprint.clone(),
            graphs: self
                .graphs
                .iter()
                .map(|g| {
                    let triplets: Vec<_> = g.edges().collect();
                    GraphRecord {
                        spec: *g.spec(),
                        nnz: triplets.len(),
                        triplets,
                    }
                })
                .collect(),
        }
    }

    fn from_file(f: PoolFile) -> Result<Self> {
        if f.version != POOL_FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported pool version {}", f.version)));
        }
        if f.m != f.graphs.len() {
            return Err(Error::Format(format!(
                "header says M = {} but file holds {} graphs",
                f.m,
                f.graphs.len()
            )));
        }
        let graphs = f
            .graphs
            .into_iter()
            .map(|g| {
                if g.nnz != g.triplets.len() {
                    return Err(Error::Format(format!("nnz {} != {} triplets", g.nnz, g.triplets.len())));
                }
                g.spec.validate(f.n)?;
                BaseGraph::from_edges(g.spec, f.n, g.triplets)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(graphs, f.fingerprint, f.d)
    }
}

#[derive(Serialize, Deserialize)]
struct PoolFile {
    version: u32,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "N")]
    n: usize,
    d: usize,
    fingerprint: String,
    graphs: Vec<GraphRecord>,
}

#[derive(Serialize, Deserialize)]
struct GraphRecord {
    spec: GraphSpec,
    nnz: usize,
    triplets: Vec<(usize, usize, f64)>,
}

pub fn build_pool(ds: &Dataset, specs: &[GraphSpec]) -> Result<GraphPool> {
    if specs.is_empty() {
        return Err(Error::InvalidParameter("at least one graph spec is required".into()));
    }
    let graphs = specs.iter().map(|s| build_graph(ds, s)).collect::<Result<Vec<_>>>()?;
    GraphPool::new(graphs, ds.fingerprint(), ds.dim())
}

/// Median Euclidean distance over all unordered pairs.
pub fn median_pairwise_distance(ds: &Dataset) -> f64 {
    let n = ds.len();
    let mut d: Vec<f64> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| sq_dist(ds.features(i), ds.features(j)).sqrt())
        .collect();
    if d.is_empty() {
        return 0.0;
    }
    let mid = d.len() / 2;
    let (_, &mut hi, _) = d.select_nth_unstable_by(mid, f64::total_cmp);
    if d.len() % 2 == 1 {
        hi
    } else {
        let lo = d[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lo + hi)
    }
}

/// Cross product of schemes and `k` values; gaussian entries are further
/// crossed with `sigma_scale * sigma_mults`.
pub fn grid_specs(schemes: &[Scheme], ks: &[usize], sigma_mults: &[f64], sigma_scale: f64) -> Vec<GraphSpec> {
    let mut out = Vec::new();
    for &scheme in schemes {
        for &k in ks {
            if scheme == Scheme::Gaussian {
                out.extend(sigma_mults.iter().map(|m| GraphSpec::gaussian(k, m * sigma_scale)));
            } else {
                out.push(GraphSpec::new(scheme, k));
            }
        }
    }
    out
}
