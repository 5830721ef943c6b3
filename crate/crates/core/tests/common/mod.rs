//! Independent reference computations for integration tests. Nothing here
//! calls into the solver, graph or metric code it is used to check.
#![allow(dead_code, clippy::needless_range_loop)]

use multig_rank::dataset::{Dataset, DomainRecord, Label};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub type Dense = Vec<Vec<f64>>;

pub fn zeros(n: usize) -> Dense {
    vec![vec![0.0; n]; n]
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn inverse(a: &Dense) -> Dense {
    let n = a.len();
    let mut m: Dense = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| m[x][c].abs().partial_cmp(&m[y][c].abs()).unwrap())
            .unwrap();
        m.swap(c, p);
        let piv = m[c][c];
        assert!(piv.abs() > 1e-300, "oracle: singular matrix");
        for v in m[c].iter_mut() {
            *v /= piv;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                if f != 0.0 {
                    for k in 0..2 * n {
                        m[r][k] -= f * m[c][k];
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn matvec(a: &Dense, x: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

pub fn rel_err(x: &[f64], reference: &[f64]) -> f64 {
    let num: f64 = x
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let den: f64 = reference.iter().map(|b| b * b).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// `D - W` from a dense weight matrix.
pub fn laplacian_of(w: &Dense) -> Dense {
    let n = w.len();
    let mut l = zeros(n);
    for i in 0..n {
        for j in 0..n {
            l[i][j] = -w[i][j];
        }
        l[i][i] += w[i].iter().sum::<f64>();
    }
    l
}

/// `1/2 sum_ij W_ij (f_i - f_j)^2`.
pub fn half_double_sum(w: &Dense, f: &[f64]) -> f64 {
    let n = w.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += w[i][j] * (f[i] - f[j]).powi(2);
        }
    }
    0.5 * s
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Edge weights written directly from the defining formulas.
pub fn oracle_weight(scheme: &str, a: &[f64], b: &[f64], sigma: f64) -> f64 {
    let w = match scheme {
        "gaussian" => {
            let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
            (-d2 / (2.0 * sigma * sigma)).exp()
        }
        "dot_product" => dot(a, b),
        "cosine" => dot(a, b) / (dot(a, a).sqrt() * dot(b, b).sqrt()),
        "jaccard" => {
            let lo: f64 = a.iter().zip(b).map(|(x, y)| x.min(*y)).sum();
            let hi: f64 = a.iter().zip(b).map(|(x, y)| x.max(*y)).sum();
            lo / hi
        }
        "tanimoto" => dot(a, b) / (dot(a, a) + dot(b, b) - dot(a, b)),
        _ => unreachable!(),
    };
    w.max(0.0)
}

/// Neighbor-selection closeness: negative squared distance for gaussian
/// and dot-product, the similarity itself otherwise.
pub fn oracle_closeness(scheme: &str, a: &[f64], b: &[f64]) -> f64 {
    match scheme {
        "gaussian" | "dot_product" => -a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>(),
        s => oracle_weight(s, a, b, 1.0),
    }
}

/// Exhaustive k-NN: repeatedly take the closest remaining candidate, the
/// lowest index winning ties.
pub fn brute_knn(points: &[Vec<f64>], query: &[f64], exclude: Option<usize>, scheme: &str, k: usize) -> Vec<usize> {
    let mut taken = vec![false; points.len()];
    if let Some(e) = exclude {
        taken[e] = true;
    }
    let mut out = Vec::new();
    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for (j, p) in points.iter().enumerate() {
            if taken[j] {
                continue;
            }
            let s = oracle_closeness(scheme, query, p);
            if best.is_none_or(|(_, bs)| s > bs) {
                best = Some((j, s));
            }
        }
        let (j, _) = best.unwrap();
        taken[j] = true;
        out.push(j);
    }
    out
}

/// Dense W of the union-symmetrized k-NN graph, built from scratch.
pub fn brute_graph(points: &[Vec<f64>], scheme: &str, k: usize, sigma: f64) -> Dense {
    let n = points.len();
    let mut w = zeros(n);
    for i in 0..n {
        for j in brute_knn(points, &points[i], Some(i), scheme, k) {
            let v = oracle_weight(scheme, &points[i], &points[j], sigma);
            w[i][j] = v;
            w[j][i] = v;
        }
    }
    w
}

/// `(concordant + ties / 2) / (P * N)` by direct pair enumeration.
pub fn pair_auc(scores: &[f64], relevant: &[bool]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &ri) in relevant.iter().enumerate() {
        if !ri {
            continue;
        }
        for (j, &rj) in relevant.iter().enumerate() {
            if rj {
                continue;
            }
            den += 1.0;
            if scores[i] > scores[j] {
                num += 1.0;
            } else if scores[i] == scores[j] {
                num += 0.5;
            }
        }
    }
    num / den
}

pub fn uniform_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(0.05..1.0)).collect())
        .collect()
}

pub fn dataset_from(points: &[Vec<f64>], labels: &[&str]) -> Dataset {
    Dataset::new(
        points
            .iter()
            .enumerate()
            .map(|(i, p)| DomainRecord {
                id: format!("x{i:03}"),
                label: Label::parse(labels[i % labels.len()]).unwrap(),
                features: p.clone(),
            })
            .collect(),
    )
    .unwrap()
}

/// Random point on the probability simplex.
pub fn random_simplex(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| -rng.random_range(1e-9f64..1.0).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

/// Minimizer of `alpha e.mu + beta |mu|^2` over the 3-simplex grid with the
/// given step (first hit wins on ties).
pub fn grid_qp3(e: [f64; 3], alpha: f64, beta: f64, step: f64) -> [f64; 3] {
    let steps = (1.0 / step).round() as usize;
    let mut best = (f64::INFINITY, [0.0; 3]);
    for i in 0..=steps {
        for j in 0..=steps - i {
            let mu = [i as f64 * step, j as f64 * step, (steps - i - j) as f64 * step];
            let obj = alpha * (e[0] * mu[0] + e[1] * mu[1] + e[2] * mu[2])
                + beta * (mu[0] * mu[0] + mu[1] * mu[1] + mu[2] * mu[2]);
            if obj < best.0 {
                best = (obj, mu);
            }
        }
    }
    best.1
}

pub fn smallest_eigenvalue(a: &Dense) -> f64 {
    let n = a.len();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| a[i][j]);
    m.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub const SCHEMES: [&str; 5] = ["gaussian", "dot_product", "cosine", "jaccard", "tanimoto"];
