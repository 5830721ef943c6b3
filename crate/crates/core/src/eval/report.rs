use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{rank_auc, roc_curve, CurvePoint};
use crate::dataset::{relevant_mask, Dataset, DomainRecord};
use crate::error::{Error, Result};
use crate::ranker::RankedList;

/// Number of grid points used for averaged curves.
pub const CURVE_GRID: usize = 101;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryAuc {
    pub id: String,
    pub auc: f64,
    #[serde(skip)]
    pub n_relevant: usize,
}

/// Per-query AUCs and curves averaged over the query set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mean_auc: f64,
    pub per_query: Vec<QueryAuc>,
    /// `[fpr, tpr]`, tpr vertically averaged on a uniform fpr grid.
    pub roc: Vec<[f64; 2]>,
    /// `[recall, precision]`, interpolated precision averaged on a uniform
    /// recall grid.
    pub pr: Vec<[f64; 2]>,
    pub level: usize,
    /// Queries with no (or only) relevant database items.
    pub skipped: usize,
}

impl EvalReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn grid(i: usize) -> f64 {
    i as f64 / (CURVE_GRID - 1) as f64
}

/// tpr at each grid fpr, linear between successive cuts; at an fpr shared
/// by several cuts the highest tpr is used.
fn roc_on_grid(curve: &[CurvePoint]) -> Vec<f64> {
    (0..CURVE_GRID)
        .map(|g| {
            let x = grid(g);
            let i = curve.partition_point(|p| p.fpr <= x).max(1) - 1;
            match curve.get(i + 1) {
                Some(next) if curve[i].fpr < x => {
                    let a = &curve[i];
                    a.tpr + (x - a.fpr) / (next.fpr - a.fpr) * (next.tpr - a.tpr)
                }
                _ => curve[i].tpr,
            }
        })
        .collect()
}

/// Interpolated precision: best precision at recall >= r.
fn pr_on_grid(curve: &[CurvePoint]) -> Vec<f64> {
    (0..CURVE_GRID)
        .map(|g| {
            let r = grid(g);
            curve
                .iter()
                .filter(|p| p.recall >= r - 1e-12)
                .filter_map(|p| p.precision)
                .fold(0.0, f64::max)
        })
        .collect()
}

struct QueryOutcome {
    auc: QueryAuc,
    roc: Vec<f64>,
    pr: Vec<f64>,
}

/// Runs `ranker` for every query and scores its list against database
/// labels agreeing with the query's label down to `level`.
pub fn evaluate_queries<F>(ranker: F, db: &Dataset, queries: &Dataset, level: usize) -> Result<EvalReport>
where
    F: Fn(&DomainRecord) -> Result<RankedList> + Sync,
{
    db.check_level(level)?;
    queries.check_level(level)?;
    let outcomes = queries
        .records()
        .par_iter()
        .map(|q| {
            let rel = relevant_mask(db, &q.label, level);
            let n_rel = rel.iter().filter(|&&r| r).count();
            if n_rel == 0 || n_rel == rel.len() {
                return Ok(None);
            }
            let ranked = ranker(q)?;
            if ranked.len() != db.len() {
                return Err(Error::InvalidParameter(format!(
                    "ranker returned {} scores for a database of {}",
                    ranked.len(),
                    db.len()
                )));
            }
            let curve = roc_curve(&ranked, &rel)?;
            Ok(Some(QueryOutcome {
                auc: QueryAuc {
                    id: q.id.clone(),
                    auc: rank_auc(&ranked.scores, &rel)?,
                    n_relevant: n_rel,
                },
                roc: roc_on_grid(&curve),
                pr: pr_on_grid(&curve),
            }))
        })
        .collect::<Result<Vec<_>>>()?;

    let skipped = outcomes.iter().filter(|o| o.is_none()).count();
    let done: Vec<QueryOutcome> = outcomes.into_iter().flatten().collect();
    if done.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no query has both relevant and irrelevant database items at level {level}"
        )));
    }
    let m = done.len() as f64;
    let mean_auc = done.iter().map(|o| o.auc.auc).sum::<f64>() / m;
    let avg = |pick: fn(&QueryOutcome) -> &Vec<f64>| -> Vec<[f64; 2]> {
        (0..CURVE_GRID)
            .map(|g| [grid(g), done.iter().map(|o| pick(o)[g]).sum::<f64>() / m])
            .collect()
    };
    let roc = avg(|o| &o.roc);
    let pr = avg(|o| &o.pr);
    Ok(EvalReport {
        mean_auc,
        per_query: done.into_iter().map(|o| o.auc).collect(),
        roc,
        pr,
        level,
        skipped,
    })
}
