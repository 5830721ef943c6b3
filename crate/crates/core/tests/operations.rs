#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use multig_rank::dataset::{generate_synthetic, relevance_matrix, split_queries, QueryMode, SyntheticParams};
use multig_rank::eval::evaluate_queries;
use multig_rank::graph::{
    build_graph, build_pool, extend_graph, knn_neighbors, median_pairwise_distance, GraphPool, GraphSpec, Scheme,
};
use multig_rank::ranker::{
    grank_solve, offline_f_update, rank_online, rank_pairwise_baseline, train_offline, GraphWeights, HyperParams,
    OnlineRanker,
};
use rand::Rng;

fn spec_for(name: &str, k: usize, sigma: f64) -> GraphSpec {
    let scheme: Scheme = name.parse().unwrap();
    if scheme == Scheme::Gaussian {
        GraphSpec::gaussian(k, sigma)
    } else {
        GraphSpec::new(scheme, k)
    }
}

fn dense_w(g: &multig_rank::graph::BaseGraph) -> Dense {
    let m = g.weights().to_dense();
    (0..g.n()).map(|i| (0..g.n()).map(|j| m[(i, j)]).collect()).collect()
}

#[test]
fn knn_matches_exhaustive_scan() {
    let mut r = rng(1);
    for trial in 0..20 {
        let pts = uniform_points(&mut r, 10, 3);
        let ds = dataset_from(&pts, &["a"]);
        for name in SCHEMES {
            let k = 1 + trial % 4;
            let nb = knn_neighbors(&ds, &spec_for(name, k, 0.7)).unwrap();
            for (i, got) in nb.iter().enumerate() {
                assert_eq!(got, &brute_knn(&pts, &pts[i], Some(i), name, k), "{name} node {i}");
            }
        }
    }
}

#[test]
fn built_graph_matches_brute_force_and_quadratic_form() {
    let mut r = rng(2);
    for _ in 0..10 {
        let pts = uniform_points(&mut r, 8, 4);
        let ds = dataset_from(&pts, &["a"]);
        for name in SCHEMES {
            let g = build_graph(&ds, &spec_for(name, 2, 0.5)).unwrap();
            let w = dense_w(&g);
            let oracle = brute_graph(&pts, name, 2, 0.5);
            for i in 0..8 {
                for j in 0..8 {
                    assert!((w[i][j] - oracle[i][j]).abs() < 1e-14, "{name} W[{i}][{j}]");
                }
            }
            let f: Vec<f64> = (0..8).map(|_| r.random_range(-3.0..3.0)).collect();
            let lf = g.laplacian().matvec(&f);
            let flf = dot(&f, &lf);
            assert!((flf - half_double_sum(&w, &f)).abs() <= 1e-10);
            assert!((g.quadratic_form(&f) - flf).abs() <= 1e-10);
        }
    }
}

#[test]
fn extension_freezes_database_block() {
    let mut r = rng(3);
    let pts = uniform_points(&mut r, 12, 3);
    let ds = dataset_from(&pts, &["a"]);
    for name in SCHEMES {
        let g = build_graph(&ds, &spec_for(name, 3, 0.4)).unwrap();
        let x0: Vec<f64> = (0..3).map(|_| r.random_range(0.05..1.0)).collect();
        let ext = extend_graph(&g, &ds, &x0).unwrap();
        let w = dense_w(&g);
        let we = dense_w(&ext);
        for i in 0..12 {
            for j in 0..12 {
                assert_eq!(we[i + 1][j + 1], w[i][j]);
            }
        }
        let nb = brute_knn(&pts, &x0, None, name, 3);
        for j in 0..12 {
            let expect = if nb.contains(&j) {
                oracle_weight(name, &x0, &pts[j], 0.4)
            } else {
                0.0
            };
            assert!((we[0][j + 1] - expect).abs() < 1e-14);
        }
        let l = laplacian_of(&we);
        assert!(ext.laplacian().matvec(&[1.0; 13]).iter().all(|v| v.abs() <= 1e-12));
        assert!(smallest_eigenvalue(&l) >= -1e-10);
    }
    let g = build_graph(&ds, &GraphSpec::gaussian(2, 1.0)).unwrap();
    let ext = extend_graph(&g, &ds, &pts[1]).unwrap();
    assert_eq!(ext.weights().get(0, 2), 1.0);
}

#[test]
fn grank_solve_matches_inverse_oracle() {
    let mut r = rng(4);
    for _ in 0..20 {
        let pts = uniform_points(&mut r, 6, 2);
        let ds = dataset_from(&pts, &["a"]);
        let g = build_graph(&ds, &GraphSpec::new(Scheme::Tanimoto, 2)).unwrap();
        let u: Vec<f64> = (0..6)
            .map(|i| if i == 0 || r.random_bool(0.4) { 1.0 } else { 0.0 })
            .collect();
        let y: Vec<f64> = (0..6).map(|_| r.random_range(-1.0..1.0)).collect();
        let alpha = r.random_range(0.1..5.0);
        let ridge = 1e-3;
        let f = grank_solve(&g.laplacian(), &u, &y, alpha, ridge).unwrap();
        let mut a = laplacian_of(&dense_w(&g));
        for (i, row) in a.iter_mut().enumerate() {
            for v in row.iter_mut() {
                *v *= alpha;
            }
            row[i] += u[i] + ridge;
        }
        let uy: Vec<f64> = u.iter().zip(&y).map(|(a, b)| a * b).collect();
        let oracle = matvec(&inverse(&a), &uy);
        assert!(rel_err(&f, &oracle) <= 1e-8);
    }
}

fn small_pool(seed: u64, n_per: usize, specs: &[GraphSpec]) -> (multig_rank::dataset::Dataset, GraphPool) {
    let ds = generate_synthetic(&SyntheticParams {
        n_classes: 2,
        per_class: n_per,
        dim: 3,
        spread: 1.0,
        separation: 1.0,
        seed,
    })
    .unwrap();
    let pool = build_pool(&ds, specs).unwrap();
    (ds, pool)
}

#[test]
fn f_update_single_graph_equals_grank_per_column() {
    let (ds, pool) = small_pool(5, 5, &[GraphSpec::new(Scheme::Cosine, 3)]);
    let y = relevance_matrix(&ds, 1).unwrap();
    let f = offline_f_update(&pool, &GraphWeights::uniform(1), &y, 0.7).unwrap();
    let l = pool.graphs()[0].laplacian();
    for q in 0..ds.len() {
        let col = grank_solve(&l, &vec![1.0; ds.len()], &y.column(q), 0.7, 0.0).unwrap();
        for i in 0..ds.len() {
            assert!((f[(i, q)] - col[i]).abs() < 1e-12);
        }
    }
}

#[test]
fn f_update_matches_inverse_oracle() {
    let mut r = rng(6);
    let (ds, pool) = small_pool(
        6,
        4,
        &[
            GraphSpec::gaussian(2, 1.0),
            GraphSpec::new(Scheme::DotProduct, 3),
            GraphSpec::new(Scheme::Jaccard, 1),
        ],
    );
    let y = relevance_matrix(&ds, 1).unwrap();
    for _ in 0..5 {
        let mu = random_simplex(&mut r, 3);
        let alpha = r.random_range(0.1..3.0);
        let f = offline_f_update(&pool, &GraphWeights::new(mu.clone()).unwrap(), &y, alpha).unwrap();
        let mut a = zeros(8);
        for (m, g) in pool.graphs().iter().enumerate() {
            let l = laplacian_of(&dense_w(g));
            for i in 0..8 {
                for j in 0..8 {
                    a[i][j] += alpha * mu[m] * l[i][j];
                }
            }
        }
        for (i, row) in a.iter_mut().enumerate() {
            row[i] += 1.0;
        }
        let inv = inverse(&a);
        for q in 0..8 {
            let oracle = matvec(&inv, &y.column(q));
            let got: Vec<f64> = f.column(q).iter().copied().collect();
            assert!(rel_err(&got, &oracle) <= 1e-8);
        }
    }
}

/// A graph whose neighborhoods ignore class structure gets less weight than
/// one that follows it.
#[test]
fn training_prefers_class_aligned_graph() {
    let ds = generate_synthetic(&SyntheticParams {
        n_classes: 3,
        per_class: 12,
        dim: 4,
        spread: 1.0,
        separation: 6.0,
        seed: 8,
    })
    .unwrap();
    let sigma = median_pairwise_distance(&ds);
    let good = build_graph(&ds, &GraphSpec::gaussian(4, sigma)).unwrap();
    // same features, shuffled across records
    let mut r = rng(9);
    let mut perm: Vec<usize> = (0..ds.len()).collect();
    for i in (1..perm.len()).rev() {
        perm.swap(i, r.random_range(0..=i));
    }
    let shuffled: Vec<Vec<f64>> = perm.iter().map(|&p| ds.features(p).to_vec()).collect();
    let bad = build_graph(&dataset_from(&shuffled, &["a"]), &GraphSpec::gaussian(4, sigma)).unwrap();
    let pool = GraphPool::new(vec![good, bad], ds.fingerprint(), ds.dim()).unwrap();
    let model = train_offline(&pool, &relevance_matrix(&ds, 1).unwrap(), &HyperParams::default()).unwrap();
    let mu = model.weights.as_slice();
    assert!(mu[0] > mu[1], "{mu:?}");
}

fn blob_setup(seed: u64) -> (multig_rank::dataset::Dataset, GraphPool, HyperParams) {
    let ds = generate_synthetic(&SyntheticParams {
        n_classes: 2,
        per_class: 10,
        dim: 3,
        spread: 1.0,
        separation: 10.0,
        seed,
    })
    .unwrap();
    let sigma = median_pairwise_distance(&ds);
    let pool = build_pool(&ds, &[GraphSpec::gaussian(3, sigma), GraphSpec::new(Scheme::Cosine, 3)]).unwrap();
    (ds, pool, HyperParams::default())
}

#[test]
fn online_duplicate_query_ranks_its_blob_first() {
    let (ds, pool, params) = blob_setup(10);
    let model = train_offline(&pool, &relevance_matrix(&ds, 1).unwrap(), &params).unwrap();
    for j in [0, 7, 13] {
        let ranked = rank_online(&model, &pool, &ds, "q", ds.features(j), &params).unwrap();
        let top = ranked.order[0];
        assert_eq!(ds.records()[top].label, ds.records()[j].label);
        let blob = ds.records().iter().filter(|r| r.label == ds.records()[j].label).count();
        assert!(ranked.order[..blob]
            .iter()
            .all(|&i| ds.records()[i].label == ds.records()[j].label));
    }
}

#[test]
fn online_vanishing_alpha_gives_zero_scores() {
    let (ds, pool, _) = blob_setup(11);
    let params = HyperParams {
        alpha: 1e-12,
        // scores scale like alpha / ridge off the query node
        ridge: 1e-4,
        ..Default::default()
    };
    let model = train_offline(&pool, &relevance_matrix(&ds, 1).unwrap(), &HyperParams::default()).unwrap();
    let ranked = rank_online(&model, &pool, &ds, "q", ds.features(3), &params).unwrap();
    assert!(ranked.scores.iter().all(|s| s.abs() <= 1e-6));
}

#[test]
fn online_small_instance_matches_inverse_oracle() {
    let mut r = rng(12);
    for trial in 0..10 {
        let pts = uniform_points(&mut r, 5, 2);
        let ds = dataset_from(&pts, &["a", "b"]);
        let specs = [
            GraphSpec::gaussian(2, 0.5),
            GraphSpec::new(Scheme::Cosine, 2),
            GraphSpec::new(Scheme::Jaccard, 1),
        ];
        let pool = build_pool(&ds, &specs).unwrap();
        let mu = random_simplex(&mut r, 3);
        let params = HyperParams {
            alpha: 0.5 + trial as f64 * 0.3,
            ridge: 1e-8,
            ..Default::default()
        };
        let ranker = OnlineRanker::with_weights(GraphWeights::new(mu.clone()).unwrap(), &pool, &ds, &params).unwrap();
        let x0: Vec<f64> = (0..2).map(|_| r.random_range(0.05..1.0)).collect();
        let got = ranker.solve_extended(&x0).unwrap();

        let names = ["gaussian", "cosine", "jaccard"];
        let ks = [2, 2, 1];
        let mut a = zeros(6);
        for m in 0..3 {
            let w = brute_graph(&pts, names[m], ks[m], 0.5);
            let mut we = zeros(6);
            for i in 0..5 {
                for j in 0..5 {
                    we[i + 1][j + 1] = w[i][j];
                }
            }
            for j in brute_knn(&pts, &x0, None, names[m], ks[m]) {
                let v = oracle_weight(names[m], &x0, &pts[j], 0.5);
                we[0][j + 1] = v;
                we[j + 1][0] = v;
            }
            let l = laplacian_of(&we);
            for i in 0..6 {
                for j in 0..6 {
                    a[i][j] += params.alpha * mu[m] * l[i][j];
                }
            }
        }
        a[0][0] += 1.0;
        for (i, row) in a.iter_mut().enumerate() {
            row[i] += params.ridge;
        }
        let mut e0 = vec![0.0; 6];
        e0[0] = 1.0;
        let oracle = matvec(&inverse(&a), &e0);
        assert!(rel_err(&got, &oracle) <= 1e-8, "trial {trial}: {got:?} vs {oracle:?}");
    }
}

/// Doubling alpha while halving every edge weight leaves alpha * L unchanged.
/// Dot-product weights halve when features shrink by sqrt(2), and Euclidean
/// neighbor order is scale-free.
#[test]
fn online_scale_consistency() {
    let mut r = rng(13);
    let pts = uniform_points(&mut r, 15, 3);
    let s = 0.5f64.sqrt();
    let scaled: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|v| v * s).collect()).collect();
    let ds = dataset_from(&pts, &["a", "b", "c"]);
    let ds2 = dataset_from(&scaled, &["a", "b", "c"]);
    let spec = [
        GraphSpec::new(Scheme::DotProduct, 3),
        GraphSpec::new(Scheme::DotProduct, 5),
    ];
    let pool = build_pool(&ds, &spec).unwrap();
    let pool2 = build_pool(&ds2, &spec).unwrap();
    let mu = GraphWeights::new(vec![0.3, 0.7]).unwrap();
    let p1 = HyperParams {
        alpha: 0.8,
        ..Default::default()
    };
    let p2 = HyperParams {
        alpha: 1.6,
        ..Default::default()
    };
    let x0: Vec<f64> = (0..3).map(|_| r.random_range(0.05..1.0)).collect();
    let x0s: Vec<f64> = x0.iter().map(|v| v * s).collect();
    let f1 = OnlineRanker::with_weights(mu.clone(), &pool, &ds, &p1)
        .unwrap()
        .solve_extended(&x0)
        .unwrap();
    let f2 = OnlineRanker::with_weights(mu, &pool2, &ds2, &p2)
        .unwrap()
        .solve_extended(&x0s)
        .unwrap();
    for (a, b) in f1.iter().zip(&f2) {
        assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
    }
}

#[test]
fn single_graph_arm_is_grank_on_extended_laplacian() {
    let (ds, pool, params) = blob_setup(14);
    let x0 = ds.features(4).iter().map(|v| v + 0.1).collect::<Vec<_>>();
    let ranker = OnlineRanker::single_graph(1, &pool, &ds, &params).unwrap();
    let got = ranker.solve_extended(&x0).unwrap();
    let ext = extend_graph(&pool.graphs()[1], &ds, &x0).unwrap();
    let mut u = vec![0.0; ds.len() + 1];
    u[0] = 1.0;
    let direct = grank_solve(&ext.laplacian(), &u, &u, params.alpha, params.ridge).unwrap();
    assert_eq!(got, direct);
}

#[test]
fn online_singular_without_ridge() {
    let (ds, pool, _) = blob_setup(15);
    let params = HyperParams {
        ridge: 0.0,
        ..Default::default()
    };
    let ranker = OnlineRanker::single_graph(0, &pool, &ds, &params).unwrap();
    // separated blobs: the far blob is a separate component
    let err = ranker.rank("q", ds.features(0)).unwrap_err();
    assert_eq!(err.kind(), multig_rank::ErrorKind::Numerical);
    assert!(ranker.rank("q", &[1.0, 2.0]).is_err());
}

#[test]
fn pairwise_matches_direct_formula() {
    let mut r = rng(16);
    let pts = uniform_points(&mut r, 20, 5);
    let ds = dataset_from(&pts, &["a"]);
    let x0: Vec<f64> = (0..5).map(|_| r.random_range(-1.0..1.0)).collect();
    let ranked = rank_pairwise_baseline(&ds, "q", &x0).unwrap();
    for (i, p) in pts.iter().enumerate() {
        let c = dot(&x0, p) / (dot(&x0, &x0).sqrt() * dot(p, p).sqrt());
        assert!((ranked.scores[i] - c).abs() < 1e-14);
    }
    for w in ranked.order.windows(2) {
        assert!(ranked.scores[w[0]] >= ranked.scores[w[1]]);
    }
    let top = ranked.order[0];
    let exact = rank_pairwise_baseline(&ds, "q", &pts[top]).unwrap();
    assert_eq!(exact.order[0], top);
}

/// With coincident class means no ranker can beat chance on average.
#[test]
fn zero_separation_is_chance_level() {
    let mut aucs = Vec::new();
    for seed in 0..10 {
        let all = generate_synthetic(&SyntheticParams {
            n_classes: 2,
            per_class: 32,
            dim: 8,
            spread: 1.0,
            separation: 0.0,
            seed,
        })
        .unwrap();
        let (db, queries) = split_queries(&all, 4, QueryMode::Disjoint).unwrap();
        let sigma = median_pairwise_distance(&db);
        let pool = build_pool(&db, &[GraphSpec::gaussian(5, sigma), GraphSpec::new(Scheme::Cosine, 5)]).unwrap();
        let params = HyperParams::default();
        let model = train_offline(&pool, &relevance_matrix(&db, 1).unwrap(), &params).unwrap();
        let ranker = OnlineRanker::new(&model, &pool, &db, &params).unwrap();
        let rep = evaluate_queries(|q| ranker.rank(&q.id, &q.features), &db, &queries, 1).unwrap();
        aucs.push(rep.mean_auc);
    }
    let mean = aucs.iter().sum::<f64>() / aucs.len() as f64;
    assert!((0.4..=0.6).contains(&mean), "mean AUC {mean}, per seed {aucs:?}");
}
