use std::fs;
use std::path::{Path, PathBuf};

use super::{Arm, Cli, Command, EvalArgs, GenArgs, ParamArgs, PoolArgs, RankArgs, RunConfig, TrainArgs};
use crate::dataset::{
    generate_synthetic, load_dataset, relevance_matrix, save_dataset, split_queries, Dataset, DomainRecord, Format,
    QueryMode, SyntheticParams,
};
use crate::error::{Error, Result};
use crate::eval::{curves_csv, evaluate_queries, line_plot_svg, EvalReport};
use crate::graph::{build_pool, grid_specs, median_pairwise_distance, GraphPool, Scheme};
use crate::ranker::{rank_pairwise_baseline, train_offline, HyperParams, OnlineRanker, RankModel, RankedList};

struct Ctx {
    cfg: RunConfig,
    seed: u64,
    out: PathBuf,
}

pub(super) fn dispatch(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let ctx = Ctx {
        seed: cli.seed.or(cfg.seed).unwrap_or(0),
        out: cli
            .out
            .clone()
            .or_else(|| cfg.out.clone())
            .unwrap_or_else(|| PathBuf::from("out")),
        cfg,
    };
    fs::create_dir_all(&ctx.out)?;
    match cli.command {
        Command::Gen(a) => cmd_gen(&ctx, a),
        Command::Pool(a) => cmd_pool(&ctx, a),
        Command::Train(a) => cmd_train(&ctx, a),
        Command::Rank(a) => cmd_rank(&ctx, a),
        Command::Eval(a) => cmd_eval(&ctx, a),
    }
}

fn required(flag: Option<PathBuf>, cfg: &Option<PathBuf>, name: &str) -> Result<PathBuf> {
    flag.or_else(|| cfg.clone())
        .ok_or_else(|| Error::InvalidParameter(format!("--{name} is required (flag or config key `{name}`)")))
}

fn load(path: &Path) -> Result<Dataset> {
    load_dataset(path, Format::from_path(path))
}

fn load_pool_for(path: &Path, db: &Dataset) -> Result<GraphPool> {
    let pool = GraphPool::load(path)?;
    pool.check_dataset(db)?;
    Ok(pool)
}

fn hyper_params(a: &ParamArgs, cfg: &RunConfig, base: HyperParams) -> Result<HyperParams> {
    let p = HyperParams {
        alpha: a.alpha.or(cfg.alpha).unwrap_or(base.alpha),
        beta: a.beta.or(cfg.beta).unwrap_or(base.beta),
        max_iters: a.iters.or(cfg.iters).unwrap_or(base.max_iters),
        ridge: a.ridge.or(cfg.ridge).unwrap_or(base.ridge),
        tol: a.tol.or(cfg.tol).unwrap_or(base.tol),
    };
    p.validate()?;
    Ok(p)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)?;
    Ok(())
}

fn cmd_gen(ctx: &Ctx, a: GenArgs) -> Result<()> {
    let c = &ctx.cfg;
    let per_class = a.per_class.or(c.per_class).unwrap_or(40);
    let n_queries = a.queries_per_class.or(c.queries_per_class).unwrap_or(2);
    let mode = a.query_mode.or(c.query_mode).unwrap_or_default();
    let params = SyntheticParams {
        n_classes: a.classes.or(c.classes).unwrap_or(5),
        per_class: match mode {
            QueryMode::Disjoint => per_class + n_queries,
            QueryMode::Overlapping => per_class,
        },
        dim: a.dim.or(c.dim).unwrap_or(32),
        spread: a.spread.or(c.spread).unwrap_or(1.0),
        separation: a.separation.or(c.separation).unwrap_or(10.0),
        seed: ctx.seed,
    };
    let all = generate_synthetic(&params)?;
    let (db, queries) = split_queries(&all, n_queries, mode)?;
    let (fmt, ext) = if a.json {
        (Format::Json, "json")
    } else {
        (Format::Csv, "csv")
    };
    let db_path = ctx.out.join(format!("db.{ext}"));
    let q_path = ctx.out.join(format!("queries.{ext}"));
    save_dataset(&db, &db_path, fmt)?;
    save_dataset(&queries, &q_path, fmt)?;
    println!(
        "database: {} records x {} features -> {}",
        db.len(),
        db.dim(),
        db_path.display()
    );
    println!("queries:  {} records ({mode:?}) -> {}", queries.len(), q_path.display());
    Ok(())
}

fn cmd_pool(ctx: &Ctx, a: PoolArgs) -> Result<()> {
    let c = &ctx.cfg;
    let db = load(&required(a.dataset, &c.dataset, "dataset")?)?;
    let schemes = match a.schemes.or_else(|| c.schemes.clone()) {
        Some(names) => names
            .iter()
            .map(|s| s.trim().parse())
            .collect::<Result<Vec<Scheme>>>()?,
        None => Scheme::ALL.to_vec(),
    };
    let ks = a.k.or_else(|| c.k.clone()).unwrap_or_else(|| vec![5, 10]);
    let mults = a
        .sigma_mult
        .or_else(|| c.sigma_mult.clone())
        .unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    if schemes.is_empty() || ks.is_empty() || mults.is_empty() {
        return Err(Error::InvalidParameter("graph grid must be non-empty".into()));
    }
    let median = median_pairwise_distance(&db);
    let specs = grid_specs(&schemes, &ks, &mults, median);
    let pool = build_pool(&db, &specs)?;
    let path = ctx.out.join("pool.json");
    pool.save(&path)?;
    println!("median pairwise distance: {median}");
    for (i, g) in pool.graphs().iter().enumerate() {
        println!("graph {i:>3}: {} edges={}", g.spec(), g.num_edges());
    }
    println!("pool: M={} N={} -> {}", pool.len(), pool.n(), path.display());
    Ok(())
}

fn cmd_train(ctx: &Ctx, a: TrainArgs) -> Result<()> {
    let c = &ctx.cfg;
    let db = load(&required(a.dataset, &c.dataset, "dataset")?)?;
    let pool = load_pool_for(&required(a.pool, &c.pool, "pool")?, &db)?;
    let level = a.level.or(c.level).unwrap_or(1);
    let params = hyper_params(&a.params, c, HyperParams::default())?;
    let y = relevance_matrix(&db, level)?;
    let model = train_offline(&pool, &y, &params)?;
    let path = ctx.out.join("model.json");
    model.save(&path)?;
    for (t, o) in model.objective_trace.iter().enumerate() {
        println!("iter {:>3}  objective {o}", t + 1);
    }
    for (g, mu) in pool.graphs().iter().zip(model.weights.as_slice()) {
        println!("mu {mu:<24} {}", g.spec());
    }
    println!("model -> {}", path.display());
    Ok(())
}

type RankFn<'a> = Box<dyn Fn(&DomainRecord) -> Result<RankedList> + Sync + 'a>;

fn online_fn(ranker: OnlineRanker<'_>) -> RankFn<'_> {
    Box::new(move |q| ranker.rank(&q.id, &q.features))
}

fn pairwise_fn(db: &Dataset) -> RankFn<'_> {
    Box::new(move |q| rank_pairwise_baseline(db, &q.id, &q.features))
}

fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "-_.".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn cmd_rank(ctx: &Ctx, a: RankArgs) -> Result<()> {
    let c = &ctx.cfg;
    let db = load(&required(a.dataset, &c.dataset, "dataset")?)?;
    let queries = load(&required(a.queries, &c.queries, "queries")?)?;
    let arm = a.baseline.unwrap_or(Arm::Multig);
    let pool = match arm {
        Arm::Pairwise => None,
        _ => Some(load_pool_for(&required(a.pool, &c.pool, "pool")?, &db)?),
    };
    let model = match arm {
        Arm::Multig => Some(RankModel::load(&required(a.model, &c.model, "model")?)?),
        _ => None,
    };
    let base = model.as_ref().map_or_else(HyperParams::default, |m| m.params);
    let params = hyper_params(&a.params, c, base)?;
    let rank: RankFn = match (arm, &pool, &model) {
        (Arm::Multig, Some(pool), Some(model)) => online_fn(OnlineRanker::new(model, pool, &db, &params)?),
        (Arm::Grank, Some(pool), _) => {
            let g = a
                .graph
                .ok_or_else(|| Error::InvalidParameter("--baseline grank requires --graph <index>".into()))?;
            online_fn(OnlineRanker::single_graph(g, pool, &db, &params)?)
        }
        _ => pairwise_fn(&db),
    };
    let dir = ctx.out.join("rankings");
    fs::create_dir_all(&dir)?;
    for q in queries.records() {
        let ranked = rank(q)?;
        write(&dir.join(format!("{}.tsv", file_stem(&q.id))), &ranked.to_tsv(&db))?;
    }
    println!("{} rankings -> {}", queries.len(), dir.display());
    Ok(())
}

struct ArmResult {
    name: String,
    graph: String,
    report: EvalReport,
}

fn cmd_eval(ctx: &Ctx, a: EvalArgs) -> Result<()> {
    let c = &ctx.cfg;
    let db = load(&required(a.dataset, &c.dataset, "dataset")?)?;
    let queries = load(&required(a.queries, &c.queries, "queries")?)?;
    let pool = load_pool_for(&required(a.pool, &c.pool, "pool")?, &db)?;
    let model = RankModel::load(&required(a.model, &c.model, "model")?)?;
    let level = a.level.or(c.level).unwrap_or(1);
    let params = hyper_params(&a.params, c, model.params)?;

    let multig = evaluate_queries(
        online_fn(OnlineRanker::new(&model, &pool, &db, &params)?),
        &db,
        &queries,
        level,
    )?;
    let mut singles = Vec::with_capacity(pool.len());
    for g in 0..pool.len() {
        let r = evaluate_queries(
            online_fn(OnlineRanker::single_graph(g, &pool, &db, &params)?),
            &db,
            &queries,
            level,
        )?;
        singles.push(r);
    }
    let pairwise = evaluate_queries(pairwise_fn(&db), &db, &queries, level)?;

    // best: highest mean AUC, worst: lowest; ties go to the lower index
    let mut best = 0;
    let mut worst = 0;
    for (i, r) in singles.iter().enumerate() {
        if r.mean_auc > singles[best].mean_auc {
            best = i;
        }
        if r.mean_auc < singles[worst].mean_auc {
            worst = i;
        }
    }
    let label = |i: usize| format!("{i}:{}", pool.graphs()[i].spec());
    let arms = vec![
        ArmResult {
            name: "multig".into(),
            graph: "-".into(),
            report: multig,
        },
        ArmResult {
            name: "grank_best".into(),
            graph: label(best),
            report: singles[best].clone(),
        },
        ArmResult {
            name: "grank_worst".into(),
            graph: label(worst),
            report: singles[worst].clone(),
        },
        ArmResult {
            name: "pairwise".into(),
            graph: "-".into(),
            report: pairwise,
        },
    ];

    let mut table = String::from("arm\tgraph\tmean_auc\tqueries\tskipped\n");
    for arm in &arms {
        write(
            &ctx.out.join(format!("report_{}.json", arm.name)),
            &(arm.report.to_json()? + "\n"),
        )?;
        table.push_str(&format!(
            "{}\t{}\t{:.4}\t{}\t{}\n",
            arm.name,
            arm.graph,
            arm.report.mean_auc,
            arm.report.per_query.len(),
            arm.report.skipped
        ));
    }
    write(&ctx.out.join("comparison.tsv"), &table)?;

    let mut per_graph = String::from("graph\tspec\tmean_auc\n");
    for (i, r) in singles.iter().enumerate() {
        per_graph.push_str(&format!("{i}\t{}\t{:.6}\n", pool.graphs()[i].spec(), r.mean_auc));
    }
    write(&ctx.out.join("grank_graphs.tsv"), &per_graph)?;

    let roc: Vec<(&str, &[[f64; 2]])> = arms
        .iter()
        .map(|a| (a.name.as_str(), a.report.roc.as_slice()))
        .collect();
    let pr: Vec<(&str, &[[f64; 2]])> = arms.iter().map(|a| (a.name.as_str(), a.report.pr.as_slice())).collect();
    write(&ctx.out.join("roc.csv"), &curves_csv("fpr", "tpr", &roc))?;
    write(&ctx.out.join("pr.csv"), &curves_csv("recall", "precision", &pr))?;
    write(&ctx.out.join("roc.svg"), &line_plot_svg("ROC", "FPR", "TPR", &roc))?;
    write(
        &ctx.out.join("pr.svg"),
        &line_plot_svg("Recall-precision", "Recall", "Precision", &pr),
    )?;

    print!("{table}");
    println!("reports -> {}", ctx.out.display());
    Ok(())
}
