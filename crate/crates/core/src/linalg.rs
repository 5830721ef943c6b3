//! Sparse symmetric matrices and SPD solvers.
//!
//! Systems up to [`SolverOptions::dense_threshold`] rows are factored with a
//! dense Cholesky decomposition; larger ones go through Jacobi-preconditioned
//! conjugate gradients.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Compressed sparse row matrix holding both triangles of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymCsr {
    n: usize,
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

impl SymCsr {
    /// Builds from entries given once per unordered pair (`i <= j`); the
    /// mirror entry is added automatically and duplicates are summed.
    pub fn from_upper_triplets(n: usize, entries: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut full: Vec<(usize, usize, f64)> = Vec::new();
        for (i, j, v) in entries {
            debug_assert!(i < n && j < n);
            full.push((i, j, v));
            if i != j {
                full.push((j, i, v));
            }
        }
        full.sort_by_key(|e| (e.0, e.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col = Vec::with_capacity(full.len());
        let mut val: Vec<f64> = Vec::with_capacity(full.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in full {
            if last == Some((i, j)) {
                *val.last_mut().unwrap() += v;
                continue;
            }
            col.push(j);
            val.push(v);
            row_ptr[i + 1] += 1;
            last = Some((i, j));
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, col, val }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col[r.clone()].iter().copied().zip(self.val[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col[r.clone()].binary_search(&j) {
            Ok(p) => self.val[r.start + p],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] += v;
            }
        }
        m
    }

    /// Upper-triangle entries `(i, j, v)` with `i <= j`.
    pub fn upper_triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).filter(move |&(j, _)| j >= i).map(move |(j, v)| (i, j, v)))
    }

    /// `self * a + diag(d)`.
    pub fn scaled_plus_diagonal(&self, a: f64, d: &[f64]) -> SymCsr {
        assert_eq!(d.len(), self.n);
        let entries = self
            .upper_triplets()
            .map(|(i, j, v)| (i, j, a * v))
            .chain(d.iter().enumerate().map(|(i, &v)| (i, i, v)));
        SymCsr::from_upper_triplets(self.n, entries)
    }

    /// Connected components of the off-diagonal nonzero pattern, labelled
    /// by the smallest node index in each component.
    pub fn components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (i, j, v) in self.upper_triplets() {
            if i != j && v != 0.0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    parent[hi] = lo;
                }
            }
        }
        (0..self.n).map(|i| find(&mut parent, i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Largest system size solved by dense factorization.
    pub dense_threshold: usize,
    /// Relative residual target for conjugate gradients.
    pub cg_tol: f64,
    /// Iteration cap for conjugate gradients; 0 means `10 * n + 100`.
    pub cg_max_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            dense_threshold: 4096,
            cg_tol: 1e-10,
            cg_max_iters: 0,
        }
    }
}

/// A factored (or preconditioned) SPD operator ready for repeated solves.
pub enum SpdSolver {
    Dense(Cholesky<f64, Dyn>),
    Iterative {
        a: SymCsr,
        inv_diag: Vec<f64>,
        tol: f64,
        max_iters: usize,
    },
}

impl SpdSolver {
    pub fn new(a: SymCsr, opts: &SolverOptions) -> Result<Self> {
        if a.n() <= opts.dense_threshold {
            let chol =
                Cholesky::new(a.to_dense()).ok_or_else(|| Error::Singular("matrix is not positive definite".into()))?;
            let d = chol.l_dirty().diagonal();
            let (lo, hi) = d
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            // Pivots of a PSD-but-singular matrix collapse to rounding noise.
            if !(lo * lo > hi * hi * f64::EPSILON * 1e-2) {
                return Err(Error::Singular("matrix is numerically singular".into()));
            }
            Ok(SpdSolver::Dense(chol))
        } else {
            let diag = a.diagonal();
            if diag.iter().any(|&d| !(d > 0.0)) {
                return Err(Error::Singular("nonpositive diagonal entry".into()));
            }
            let max_iters = if opts.cg_max_iters == 0 {
                10 * a.n() + 100
            } else {
                opts.cg_max_iters
            };
            Ok(SpdSolver::Iterative {
                inv_diag: diag.iter().map(|d| 1.0 / d).collect(),
                a,
                tol: opts.cg_tol,
                max_iters,
            })
        }
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        match self {
            SpdSolver::Dense(chol) => Ok(chol.solve(&DVector::from_column_slice(b)).as_slice().to_vec()),
            SpdSolver::Iterative {
                a,
                inv_diag,
                tol,
                max_iters,
            } => conjugate_gradient(a, inv_diag, b, *tol, *max_iters),
        }
    }

    /// Solves for every column of `b`.
    pub fn solve_matrix(&self, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        use rayon::prelude::*;
        match self {
            SpdSolver::Dense(chol) => Ok(chol.solve(b)),
            SpdSolver::Iterative { .. } => {
                let cols = (0..b.ncols())
                    .into_par_iter()
                    .map(|c| self.solve(b.column(c).as_slice()))
                    .collect::<Result<Vec<_>>>()?;
                let mut out = DMatrix::zeros(b.nrows(), b.ncols());
                for (c, col) in cols.into_iter().enumerate() {
                    out.column_mut(c).copy_from_slice(&col);
                }
                Ok(out)
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn conjugate_gradient(a: &SymCsr, inv_diag: &[f64], b: &[f64], tol: f64, max_iters: usize) -> Result<Vec<f64>> {
    let n = b.len();
    let b_norm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut res = 1.0;
    for _ in 0..max_iters {
        let ap = a.matvec(&p);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res = dot(&r, &r).sqrt() / b_norm;
        if res <= tol {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence {
        iters: max_iters,
        residual: res,
    })
}
