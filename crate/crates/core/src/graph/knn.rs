use rayon::prelude::*;

use super::scheme::{check_vector, selection_score, GraphSpec};
use crate::dataset::Dataset;
use crate::error::Result;

/// Indices of the `k` best candidates by descending score, ties to the
/// lower index. Returned in selection order.
pub(crate) fn top_k(mut cands: Vec<(usize, f64)>, k: usize) -> Vec<usize> {
    let cmp = |a: &(usize, f64), b: &(usize, f64)| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0));
    if k < cands.len() {
        cands.select_nth_unstable_by(k, cmp);
        cands.truncate(k);
    }
    cands.sort_by(cmp);
    cands.into_iter().map(|(i, _)| i).collect()
}

/// For every node, its `spec.k` nearest (or most similar) other nodes under
/// the scheme's selection measure, self excluded.
pub fn knn_neighbors(ds: &Dataset, spec: &GraphSpec) -> Result<Vec<Vec<usize>>> {
    let n = ds.len();
    spec.validate(n)?;
    for r in ds.records() {
        check_vector(spec.scheme, &r.features)?;
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = ds.features(i);
            let cands = (0..n)
                .filter(|&j| j != i)
                .map(|j| Ok((j, selection_score(spec, xi, ds.features(j))?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(top_k(cands, spec.k))
        })
        .collect()
}

/// The `spec.k` database nodes closest to an outside vector.
pub fn query_neighbors(ds: &Dataset, spec: &GraphSpec, x0: &[f64]) -> Result<Vec<usize>> {
    check_vector(spec.scheme, x0)?;
    let cands = (0..ds.len())
        .map(|j| Ok((j, selection_score(spec, x0, ds.features(j))?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(top_k(cands, spec.k.min(ds.len())))
}
