//! Retrieval evaluation: confusion counts over a ranked list cut at length
//! `k`, ROC and recall-precision curves obtained by varying `k`, AUC, and
//! averaging over a query set.

mod plot;
mod report;

pub use plot::{curves_csv, line_plot_svg};
pub use report::{evaluate_queries, EvalReport, QueryAuc, CURVE_GRID};

use crate::error::{Error, Result};
use crate::ranker::RankedList;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

/// Counts for the top-`k` prefix of `ranked`; `relevant[i]` marks database
/// item `i` as a positive.
pub fn confusion_at_k(ranked: &RankedList, relevant: &[bool], k: usize) -> Result<Confusion> {
    let n = ranked.len();
    if relevant.len() != n {
        return Err(Error::InvalidParameter(format!(
            "relevance mask has {} entries for {n} ranked items",
            relevant.len()
        )));
    }
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds list length {n}")));
    }
    let positives = relevant.iter().filter(|&&r| r).count();
    if positives == 0 {
        return Err(Error::InvalidParameter("relevant set is empty".into()));
    }
    let tp = ranked.order[..k].iter().filter(|&&i| relevant[i]).count();
    let fn_ = positives - tp;
    Ok(Confusion {
        tp,
        fp: k - tp,
        tn: n - k - fn_,
        fn_,
    })
}

/// One cut of the ranked list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub k: usize,
    pub tpr: f64,
    pub fpr: f64,
    pub recall: f64,
    /// `None` at `k = 0`, where `TP / (TP + FP)` is `0 / 0`.
    pub precision: Option<f64>,
}

/// One point per list length `k = 0..=N`.
pub fn roc_curve(ranked: &RankedList, relevant: &[bool]) -> Result<Vec<CurvePoint>> {
    let n = ranked.len();
    if relevant.len() != n {
        return Err(Error::InvalidParameter(format!(
            "relevance mask has {} entries for {n} ranked items",
            relevant.len()
        )));
    }
    let pos = relevant.iter().filter(|&&r| r).count();
    let neg = n - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::InvalidParameter(
            "ROC needs both relevant and irrelevant items".into(),
        ));
    }
    let mut out = Vec::with_capacity(n + 1);
    let (mut tp, mut fp) = (0usize, 0usize);
    let point = |k: usize, tp: usize, fp: usize| {
        let tpr = tp as f64 / pos as f64;
        CurvePoint {
            k,
            tpr,
            fpr: fp as f64 / neg as f64,
            recall: tpr,
            precision: (k > 0).then(|| tp as f64 / k as f64),
        }
    };
    out.push(point(0, 0, 0));
    for (k, &i) in ranked.order.iter().enumerate() {
        if relevant[i] {
            tp += 1;
        } else {
            fp += 1;
        }
        out.push(point(k + 1, tp, fp));
    }
    Ok(out)
}

/// Trapezoidal area under the ROC points.
pub fn auc(curve: &[CurvePoint]) -> f64 {
    curve
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) * 0.5)
        .sum()
}

/// Probability that a relevant item outscores an irrelevant one, ties
/// counted as one half (Mann-Whitney with mid-ranks). Equals [`auc`] of
/// [`roc_curve`] when no scores tie.
pub fn rank_auc(scores: &[f64], relevant: &[bool]) -> Result<f64> {
    let n = scores.len();
    if relevant.len() != n {
        return Err(Error::InvalidParameter(
            "scores and relevance mask differ in length".into(),
        ));
    }
    let pos = relevant.iter().filter(|&&r| r).count();
    let neg = n - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::InvalidParameter(
            "AUC needs both relevant and irrelevant items".into(),
        ));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut pos_rank_sum = 0.0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && scores[idx[end]] == scores[idx[start]] {
            end += 1;
        }
        // 1-based mid-rank of the tie block
        let mid = (start + end + 1) as f64 / 2.0;
        let block_pos = idx[start..end].iter().filter(|&&i| relevant[i]).count();
        pos_rank_sum += mid * block_pos as f64;
        start = end;
    }
    let p = pos as f64;
    Ok((pos_rank_sum - p * (p + 1.0) / 2.0) / (p * neg as f64))
}
