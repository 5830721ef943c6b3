use crate::error::{Error, Result};
use crate::linalg::{SolverOptions, SpdSolver, SymCsr};

/// Solves `(U + alpha L + ridge I) f = U y` for a single graph Laplacian.
///
/// `u` is the diagonal of `U` (0/1 entries). With `ridge = 0` the system is
/// singular whenever a connected component of the graph carries no `U`
/// mass; that case is reported as [`Error::Singular`].
pub fn grank_solve(laplacian: &SymCsr, u: &[f64], y: &[f64], alpha: f64, ridge: f64) -> Result<Vec<f64>> {
    grank_solve_with(laplacian, u, y, alpha, ridge, &SolverOptions::default())
}

pub fn grank_solve_with(
    laplacian: &SymCsr,
    u: &[f64],
    y: &[f64],
    alpha: f64,
    ridge: f64,
    opts: &SolverOptions,
) -> Result<Vec<f64>> {
    let n = laplacian.n();
    if u.len() != n || y.len() != n {
        return Err(Error::InvalidParameter(format!(
            "dimension mismatch: L is {n}x{n}, U has {}, y has {}",
            u.len(),
            y.len()
        )));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) || !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::InvalidParameter(
            "alpha and ridge must be finite and >= 0".into(),
        ));
    }
    if u.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidParameter("U must have a nonnegative diagonal".into()));
    }
    let diag: Vec<f64> = u.iter().map(|&v| v + ridge).collect();
    let a = laplacian.scaled_plus_diagonal(alpha, &diag);
    if ridge == 0.0 {
        check_anchored(&a, u)?;
    }
    let rhs: Vec<f64> = u.iter().zip(y).map(|(u, y)| u * y).collect();
    SpdSolver::new(a, opts)?.solve(&rhs)
}

/// Every connected component of `a` must contain a node with `u > 0`.
fn check_anchored(a: &SymCsr, u: &[f64]) -> Result<()> {
    let comp = a.components();
    let mut anchored = vec![false; a.n()];
    for (i, &c) in comp.iter().enumerate() {
        if u[i] > 0.0 {
            anchored[c] = true;
        }
    }
    match comp.iter().enumerate().find(|&(_, &c)| !anchored[c]) {
        Some((i, _)) => Err(Error::Singular(format!(
            "node {i} lies in a graph component with no labelled node"
        ))),
        None => Ok(()),
    }
}
