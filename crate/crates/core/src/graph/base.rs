use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::knn::{knn_neighbors, query_neighbors};
use super::scheme::{edge_weight, GraphSpec};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::SymCsr;

/// A realized k-NN graph: symmetric sparse weights `W` with zero diagonal
/// and the degree vector `D_ii = sum_j W_ij`. The Laplacian `L = D - W` is
/// materialized on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseGraph {
    spec: GraphSpec,
    weights: SymCsr,
    degree: Vec<f64>,
}

impl BaseGraph {
    /// From undirected edges `(i, j, w)` with `i < j`, each listed once.
    pub fn from_edges(spec: GraphSpec, n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        for &(i, j, w) in &edges {
            if i >= j || j >= n {
                return Err(Error::Format(format!("edge ({i}, {j}) invalid for {n} nodes")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Format(format!("edge ({i}, {j}) has invalid weight {w}")));
            }
        }
        let weights = SymCsr::from_upper_triplets(n, edges);
        let degree = (0..n).map(|i| weights.row(i).map(|(_, w)| w).sum()).collect();
        Ok(Self { spec, weights, degree })
    }

    pub fn spec(&self) -> &GraphSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.weights.n()
    }

    pub fn weights(&self) -> &SymCsr {
        &self.weights
    }

    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    /// Stored undirected edges, `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.weights.upper_triplets().filter(|&(i, j, _)| i < j)
    }

    pub fn num_edges(&self) -> usize {
        self.edges().count()
    }

    pub fn laplacian(&self) -> SymCsr {
        combine_laplacians(self.n(), [(1.0, self)])
    }

    /// `f^T L f`, evaluated as `sum_{i<j} W_ij (f_i - f_j)^2`.
    pub fn quadratic_form(&self, f: &[f64]) -> f64 {
        self.edges().map(|(i, j, w)| w * (f[i] - f[j]).powi(2)).sum()
    }

    /// `Tr(F^T L F)` for an `n x c` score matrix.
    pub fn trace_form(&self, f: &DMatrix<f64>) -> f64 {
        self.edges()
            .map(|(i, j, w)| {
                let d = f.row(i) - f.row(j);
                w * d.norm_squared()
            })
            .sum()
    }

    /// Copy with every edge weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let edges = self.edges().map(|(i, j, w)| (i, j, w * factor)).collect();
        BaseGraph::from_edges(self.spec, self.n(), edges)
    }
}

/// `sum_m mu_m L_m` over graphs on the same `n` nodes; zero-weight graphs
/// are skipped.
pub fn combine_laplacians<'a>(n: usize, parts: impl IntoIterator<Item = (f64, &'a BaseGraph)>) -> SymCsr {
    let mut entries = Vec::new();
    for (mu, g) in parts {
        if mu == 0.0 {
            continue;
        }
        assert_eq!(g.n(), n, "graphs must share the node set");
        entries.extend(g.edges().map(|(i, j, w)| (i, j, -mu * w)));
        entries.extend(g.degree.iter().enumerate().map(|(i, &d)| (i, i, mu * d)));
    }
    if entries.is_empty() {
        entries.extend((0..n).map(|i| (i, i, 0.0)));
    }
    SymCsr::from_upper_triplets(n, entries)
}

/// k-NN graph over `ds`, symmetrized by the union rule: `(i, j)` is an edge
/// when either endpoint selects the other.
pub fn build_graph(ds: &Dataset, spec: &GraphSpec) -> Result<BaseGraph> {
    let nb = knn_neighbors(ds, spec)?;
    let pairs: BTreeSet<(usize, usize)> = nb
        .iter()
        .enumerate()
        .flat_map(|(i, js)| js.iter().map(move |&j| (i.min(j), i.max(j))))
        .collect();
    let edges = pairs
        .into_par_iter()
        .map(|(i, j)| Ok((i, j, edge_weight(ds.features(i), ds.features(j), spec)?)))
        .collect::<Result<Vec<_>>>()?;
    BaseGraph::from_edges(*spec, ds.len(), edges)
}

/// Adds an outside query as node 0 and shifts database nodes to `1..=N`.
/// The database block is kept as-is; only the query's `k` edges are new.
pub fn extend_graph(g: &BaseGraph, ds: &Dataset, x0: &[f64]) -> Result<BaseGraph> {
    if x0.len() != ds.dim() {
        return Err(Error::QueryDimension {
            expected: ds.dim(),
            found: x0.len(),
        });
    }
    if g.n() != ds.len() {
        return Err(Error::InvalidParameter(format!(
            "graph has {} nodes but dataset has {} records",
            g.n(),
            ds.len()
        )));
    }
    let spec = g.spec;
    let mut edges = query_neighbors(ds, &spec, x0)?
        .into_iter()
        .map(|j| Ok((0, j + 1, edge_weight(x0, ds.features(j), &spec)?)))
        .collect::<Result<Vec<_>>>()?;
    edges.extend(g.edges().map(|(i, j, w)| (i + 1, j + 1, w)));
    BaseGraph::from_edges(spec, g.n() + 1, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{DomainRecord, Label};
    use crate::graph::Scheme;

    fn ds_from(points: &[&[f64]]) -> Dataset {
        Dataset::new(
            points
                .iter()
                .enumerate()
                .map(|(i, p)| DomainRecord {
                    id: format!("p{i}"),
                    label: Label::parse("a").unwrap(),
                    features: p.to_vec(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn two_nodes_wide_kernel() {
        let ds = ds_from(&[&[0.0], &[1.0]]);
        let g = build_graph(&ds, &GraphSpec::gaussian(1, 1e9)).unwrap();
        let w = g.weights().to_dense();
        assert!((w[(0, 1)] - 1.0).abs() < 1e-15);
        assert_eq!(w[(0, 0)], 0.0);
        let l = g.laplacian().to_dense();
        let expect = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        assert!((l - expect).abs().max() < 1e-15);
    }

    #[test]
    fn union_symmetrization() {
        // 2 picks 1, but 1 picks 0
        let ds = ds_from(&[&[0.0], &[1.0], &[10.0]]);
        let g = build_graph(&ds, &GraphSpec::gaussian(1, 5.0)).unwrap();
        let e: Vec<_> = g.edges().map(|(i, j, _)| (i, j)).collect();
        assert_eq!(e, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn laplacian_rows_sum_to_zero() {
        let ds = ds_from(&[&[0.1, 2.0], &[1.0, 0.5], &[3.0, 3.0], &[0.2, 0.2], &[5.0, 1.0]]);
        for scheme in Scheme::ALL {
            let spec = if scheme == Scheme::Gaussian {
                GraphSpec::gaussian(2, 1.0)
            } else {
                GraphSpec::new(scheme, 2)
            };
            let g = build_graph(&ds, &spec).unwrap();
            let l = g.laplacian();
            let r = l.matvec(&[1.0; 5]);
            assert!(r.iter().all(|v| v.abs() <= 1e-12), "{scheme}: {r:?}");
        }
    }

    #[test]
    fn extension_with_duplicate_point() {
        let ds = ds_from(&[&[0.0, 0.0], &[1.0, 2.0], &[4.0, 4.0]]);
        let g = build_graph(&ds, &GraphSpec::gaussian(1, 1.0)).unwrap();
        let ext = extend_graph(&g, &ds, &[1.0, 2.0]).unwrap();
        assert_eq!(ext.n(), 4);
        assert_eq!(ext.weights().get(0, 2), 1.0);
        assert_eq!(ext.weights().row(0).count(), 1);
        for (i, j, w) in g.edges() {
            assert_eq!(ext.weights().get(i + 1, j + 1), w);
        }
        assert!(matches!(
            extend_graph(&g, &ds, &[1.0]),
            Err(Error::QueryDimension { .. })
        ));
    }

    #[test]
    fn jaccard_rejects_negative_data() {
        let ds = ds_from(&[&[0.0, -1.0], &[1.0, 2.0], &[4.0, 4.0]]);
        assert!(matches!(
            build_graph(&ds, &GraphSpec::new(Scheme::Jaccard, 1)),
            Err(Error::NegativeFeature { .. })
        ));
    }
}
