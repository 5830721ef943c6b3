//! Labeled feature-vector databases: records, file ingestion, relevance
//! matrices and a synthetic Gaussian-blob generator.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Hierarchical label path, e.g. `fold/superfamily/family`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Label(Vec<String>);

impl Label {
    pub const SEPARATOR: char = '/';

    pub fn new(levels: Vec<String>) -> Result<Self> {
        if levels.is_empty() || levels.iter().any(|l| l.is_empty()) {
            return Err(Error::InvalidLabel(levels.join("/")));
        }
        Ok(Self(levels))
    }

    pub fn parse(s: &str) -> Result<Self> {
        let levels: Vec<String> = s.trim().split(Self::SEPARATOR).map(str::to_owned).collect();
        Self::new(levels).map_err(|_| Error::InvalidLabel(s.to_owned()))
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn levels(&self) -> &[String] {
        &self.0
    }

    /// The first `level` components. Panics if `level > depth`.
    pub fn prefix(&self, level: usize) -> &[String] {
        &self.0[..level]
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("/"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainRecord {
    pub id: String,
    pub label: Label,
    pub features: Vec<f64>,
}

/// An ordered, validated collection of records sharing one feature dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<DomainRecord>,
    dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Guess from the file extension; anything other than `.json` is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

impl Dataset {
    /// Validates dimensions, finiteness and id uniqueness. Rows are numbered
    /// from 1 in error messages.
    pub fn new(records: Vec<DomainRecord>) -> Result<Self> {
        let first = records.first().ok_or(Error::EmptyDataset)?;
        let dim = first.features.len();
        if dim == 0 {
            return Err(Error::Parse {
                row: 1,
                msg: "record has no features".into(),
            });
        }
        let mut seen = HashSet::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if r.features.len() != dim {
                return Err(Error::DimensionMismatch {
                    row: i + 1,
                    expected: dim,
                    found: r.features.len(),
                });
            }
            if let Some(pos) = r.features.iter().position(|v| !v.is_finite()) {
                return Err(Error::Parse {
                    row: i + 1,
                    msg: format!("feature {} is not finite", pos + 1),
                });
            }
            if !seen.insert(r.id.as_str()) {
                return Err(Error::DuplicateId(r.id.clone()));
            }
        }
        Ok(Self { records, dim })
    }

    pub fn records(&self) -> &[DomainRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn features(&self, i: usize) -> &[f64] {
        &self.records[i].features
    }

    pub fn into_records(self) -> Vec<DomainRecord> {
        self.records
    }

    /// Minimum label depth over all records.
    pub fn min_label_depth(&self) -> usize {
        self.records.iter().map(|r| r.label.depth()).min().unwrap_or(0)
    }

    pub fn check_level(&self, level: usize) -> Result<()> {
        if level == 0 {
            return Err(Error::InvalidParameter("relevance level must be >= 1".into()));
        }
        match self.records.iter().find(|r| r.label.depth() < level) {
            Some(r) => Err(Error::LevelTooDeep {
                level,
                depth: r.label.depth(),
                id: r.id.clone(),
            }),
            None => Ok(()),
        }
    }

    /// SHA-256 over ids, labels and the exact bit patterns of the features.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.dim as u64).to_le_bytes());
        h.update((self.records.len() as u64).to_le_bytes());
        for r in &self.records {
            h.update(r.id.as_bytes());
            h.update([0u8]);
            h.update(r.label.to_string().as_bytes());
            h.update([0u8]);
            for v in &r.features {
                h.update(v.to_bits().to_le_bytes());
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn load_dataset(path: &Path, format: Format) -> Result<Dataset> {
    let file = File::open(path)?;
    match format {
        Format::Csv => read_csv(BufReader::new(file)),
        Format::Json => read_json(BufReader::new(file)),
    }
}

pub fn save_dataset(ds: &Dataset, path: &Path, format: Format) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    match format {
        Format::Csv => write_csv(ds, &mut w)?,
        Format::Json => write_json(ds, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::EmptyDataset);
    }
    if header.len() < 3 || &header[0] != "id" || &header[1] != "label" {
        return Err(Error::Format("CSV header must be `id,label,f1,...,fd`".into()));
    }
    let dim = header.len() - 2;
    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let n = i + 1;
        if row.len() != dim + 2 {
            return Err(Error::DimensionMismatch {
                row: n,
                expected: dim,
                found: row.len().saturating_sub(2),
            });
        }
        let features = row
            .iter()
            .skip(2)
            .map(|s| {
                s.parse::<f64>().map_err(|e| Error::Parse {
                    row: n,
                    msg: format!("{s:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        records.push(DomainRecord {
            id: row[0].to_owned(),
            label: Label::parse(&row[1])?,
            features,
        });
    }
    Dataset::new(records)
}

pub fn write_csv<W: Write>(ds: &Dataset, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["id".to_owned(), "label".to_owned()];
    header.extend((1..=ds.dim).map(|i| format!("f{i}")));
    wtr.write_record(&header)?;
    for r in &ds.records {
        let mut row = vec![r.id.clone(), r.label.to_string()];
        row.extend(r.features.iter().map(|v| v.to_string()));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct JsonRecord {
    id: String,
    label: String,
    features: Vec<f64>,
}

pub fn read_json<R: Read>(reader: R) -> Result<Dataset> {
    let rows: Vec<JsonRecord> = serde_json::from_reader(reader)?;
    let records = rows
        .into_iter()
        .map(|r| {
            Ok(DomainRecord {
                label: Label::parse(&r.label)?,
                id: r.id,
                features: r.features,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(records)
}

pub fn write_json<W: Write>(ds: &Dataset, w: W) -> Result<()> {
    let rows: Vec<JsonRecord> = ds
        .records
        .iter()
        .map(|r| JsonRecord {
            id: r.id.clone(),
            label: r.label.to_string(),
            features: r.features.clone(),
        })
        .collect();
    serde_json::to_writer_pretty(w, &rows)?;
    Ok(())
}

/// Binary relevance `Y[i][q] = 1` iff records `i` and `q` share a label
/// prefix of length `level`.
///
/// Stored as one group index per record, so the matrix is symmetric with a
/// unit diagonal by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevanceMatrix {
    groups: Vec<usize>,
    level: usize,
}

impl RelevanceMatrix {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn get(&self, i: usize, q: usize) -> bool {
        self.groups[i] == self.groups[q]
    }

    pub fn column(&self, q: usize) -> Vec<f64> {
        let g = self.groups[q];
        self.groups.iter().map(|&x| if x == g { 1.0 } else { 0.0 }).collect()
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.groups.len();
        nalgebra::DMatrix::from_fn(n, n, |i, q| if self.get(i, q) { 1.0 } else { 0.0 })
    }
}

pub fn relevance_matrix(ds: &Dataset, level: usize) -> Result<RelevanceMatrix> {
    ds.check_level(level)?;
    let mut ids: BTreeMap<&[String], usize> = BTreeMap::new();
    let groups = ds
        .records
        .iter()
        .map(|r| {
            let next = ids.len();
            *ids.entry(r.label.prefix(level)).or_insert(next)
        })
        .collect();
    Ok(RelevanceMatrix { groups, level })
}

/// Mask over `db` of records whose label agrees with `label` up to `level`.
pub fn relevant_mask(db: &Dataset, label: &Label, level: usize) -> Vec<bool> {
    let key = &label.levels()[..level.min(label.depth())];
    db.records
        .iter()
        .map(|r| r.label.depth() >= level && r.label.prefix(level) == key)
        .collect()
}

/// Parameters of the Gaussian-blob generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticParams {
    pub n_classes: usize,
    pub per_class: usize,
    pub dim: usize,
    pub spread: f64,
    pub separation: f64,
    pub seed: u64,
}

/// Isotropic Gaussian blobs. Class means have i.i.d. `N(0, separation^2)`
/// coordinates, points are `mean + spread * N(0, I)`. The whole set is then
/// translated so every feature column has minimum 0, which keeps the
/// nonnegative-only weighting schemes usable without changing distances.
pub fn generate_synthetic(p: &SyntheticParams) -> Result<Dataset> {
    if p.n_classes == 0 || p.per_class == 0 || p.dim == 0 {
        return Err(Error::InvalidParameter(
            "n_classes, per_class and dim must be >= 1".into(),
        ));
    }
    if !(p.spread > 0.0 && p.spread.is_finite()) {
        return Err(Error::InvalidParameter("spread must be > 0".into()));
    }
    if !(p.separation >= 0.0 && p.separation.is_finite()) {
        return Err(Error::InvalidParameter("separation must be >= 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let means: Vec<Vec<f64>> = (0..p.n_classes)
        .map(|_| {
            (0..p.dim)
                .map(|_| p.separation * rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect();
    let mut records = Vec::with_capacity(p.n_classes * p.per_class);
    for (c, mean) in means.iter().enumerate() {
        for _ in 0..p.per_class {
            let features = mean
                .iter()
                .map(|m| m + p.spread * rng.sample::<f64, _>(StandardNormal))
                .collect();
            records.push(DomainRecord {
                id: format!("d{:05}", records.len()),
                label: Label(vec![format!("class{c}")]),
                features,
            });
        }
    }
    for l in 0..p.dim {
        let min = records.iter().map(|r| r.features[l]).fold(f64::INFINITY, f64::min);
        for r in &mut records {
            r.features[l] -= min;
        }
    }
    Dataset::new(records)
}

/// How query records relate to the database they are evaluated against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum QueryMode {
    /// Queries are removed from the database.
    #[default]
    Disjoint,
    /// Queries remain in the database as well.
    Overlapping,
}

/// Takes the last `per_class` records of every full label as queries.
/// Classes with fewer than `per_class + 1` records contribute fewer queries
/// so at least one record of each class stays in the database.
pub fn split_queries(ds: &Dataset, per_class: usize, mode: QueryMode) -> Result<(Dataset, Dataset)> {
    let mut by_label: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, r) in ds.records.iter().enumerate() {
        by_label.entry(r.label.to_string()).or_default().push(i);
    }
    let mut is_query = vec![false; ds.len()];
    for idx in by_label.values() {
        let take = per_class.min(idx.len().saturating_sub(1));
        for &i in &idx[idx.len() - take..] {
            is_query[i] = true;
        }
    }
    let queries: Vec<DomainRecord> = ds
        .records
        .iter()
        .zip(&is_query)
        .filter(|(_, &q)| q)
        .map(|(r, _)| r.clone())
        .collect();
    let db: Vec<DomainRecord> = match mode {
        QueryMode::Disjoint => ds
            .records
            .iter()
            .zip(&is_query)
            .filter(|(_, &q)| !q)
            .map(|(r, _)| r.clone())
            .collect(),
        QueryMode::Overlapping => ds.records.clone(),
    };
    Ok((Dataset::new(db)?, Dataset::new(queries)?))
}
