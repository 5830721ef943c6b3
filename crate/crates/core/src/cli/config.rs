use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::dataset::QueryMode;
use crate::error::{Error, Result};

/// Settings read from a `--config` TOML file. Every key is optional and
/// every key can be overridden by the matching command-line flag.
///
/// ```toml
/// seed = 7
/// out = "runs/demo"
/// dataset = "runs/demo/db.csv"
/// schemes = ["gaussian", "cosine"]
/// k = [5, 10]
/// alpha = 1.0
/// ```
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,

    pub dataset: Option<PathBuf>,
    pub queries: Option<PathBuf>,
    pub pool: Option<PathBuf>,
    pub model: Option<PathBuf>,

    pub classes: Option<usize>,
    pub per_class: Option<usize>,
    pub dim: Option<usize>,
    pub spread: Option<f64>,
    pub separation: Option<f64>,
    pub queries_per_class: Option<usize>,
    pub query_mode: Option<QueryMode>,

    pub schemes: Option<Vec<String>>,
    pub k: Option<Vec<usize>>,
    pub sigma_mult: Option<Vec<f64>>,

    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub iters: Option<usize>,
    pub ridge: Option<f64>,
    pub tol: Option<f64>,
    pub level: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }
}
