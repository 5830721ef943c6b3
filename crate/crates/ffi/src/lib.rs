//! C ABI for multig-rank.
//!
//! Every object crosses the boundary as an opaque pointer that the caller
//! releases with the matching `mgr_*_free`. Functions return an
//! [`MgrStatus`]; on failure `mgr_last_error()` describes the problem until
//! the next call on the same thread. Pointer arguments must be null or valid
//! for the documented length; strings are NUL-terminated UTF-8 paths.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use multig_rank::dataset::{generate_synthetic, load_dataset, relevance_matrix, Dataset, Format, SyntheticParams};
use multig_rank::graph::{build_pool, grid_specs, median_pairwise_distance, GraphPool, Scheme};
use multig_rank::ranker::{rank_pairwise_baseline, train_offline, HyperParams, OnlineRanker, RankModel, RankedList};
use multig_rank::{Error, ErrorKind};

pub struct MgrDataset(Dataset);
pub struct MgrPool(GraphPool);
pub struct MgrModel(RankModel);
pub struct MgrRanking(RankedList);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MgrStatus {
    Ok = 0,
    Validation = 1,
    Numerical = 2,
    Io = 3,
    NullPointer = 4,
    Panic = 5,
}

/// Hyper-parameters for training and online ranking.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MgrParams {
    pub alpha: f64,
    pub beta: f64,
    pub max_iters: usize,
    pub ridge: f64,
    pub tol: f64,
}

impl From<MgrParams> for HyperParams {
    fn from(p: MgrParams) -> Self {
        HyperParams {
            alpha: p.alpha,
            beta: p.beta,
            max_iters: p.max_iters,
            ridge: p.ridge,
            tol: p.tol,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(MgrStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e.kind() {
            ErrorKind::Validation => MgrStatus::Validation,
            ErrorKind::Numerical => MgrStatus::Numerical,
            ErrorKind::Io => MgrStatus::Io,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(MgrStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MgrStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MgrStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            MgrStatus::Panic
        }
    }
}

unsafe fn obj<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn path(p: *const c_char) -> Result<PathBuf, Fail> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(MgrStatus::Validation, "path is not UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next `mgr_*` call on the same thread.
#[no_mangle]
pub extern "C" fn mgr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Defaults: alpha 1, beta 1, 20 iterations, ridge 1e-8, tol 0.
#[no_mangle]
pub extern "C" fn mgr_params_default() -> MgrParams {
    let p = HyperParams::default();
    MgrParams {
        alpha: p.alpha,
        beta: p.beta,
        max_iters: p.max_iters,
        ridge: p.ridge,
        tol: p.tol,
    }
}

/// Loads a `.csv` or `.json` dataset.
#[no_mangle]
pub unsafe extern "C" fn mgr_dataset_load(file: *const c_char, out: *mut *mut MgrDataset) -> MgrStatus {
    guard(|| {
        let p = path(file)?;
        let ds = load_dataset(&p, Format::from_path(&p))?;
        put(out, MgrDataset(ds))
    })
}

#[no_mangle]
pub unsafe extern "C" fn mgr_dataset_generate(
    n_classes: usize,
    per_class: usize,
    dim: usize,
    spread: f64,
    separation: f64,
    seed: u64,
    out: *mut *mut MgrDataset,
) -> MgrStatus {
    guard(|| {
        let ds = generate_synthetic(&SyntheticParams {
            n_classes,
            per_class,
            dim,
            spread,
            separation,
            seed,
        })?;
        put(out, MgrDataset(ds))
    })
}

/// Number of records; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn mgr_dataset_len(ds: *const MgrDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn mgr_dataset_dim(ds: *const MgrDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.dim())
}

#[no_mangle]
pub unsafe extern "C" fn mgr_dataset_free(ds: *mut MgrDataset) {
    free(ds)
}

/// Pool over all five schemes for every `k` in `ks`; gaussian graphs get one
/// bandwidth per entry of `sigma_mults`, scaled by the median pairwise
/// distance.
#[no_mangle]
pub unsafe extern "C" fn mgr_pool_build(
    ds: *const MgrDataset,
    ks: *const usize,
    n_ks: usize,
    sigma_mults: *const f64,
    n_sigma: usize,
    out: *mut *mut MgrPool,
) -> MgrStatus {
    guard(|| {
        let ds = &obj(ds, "dataset")?.0;
        let ks = slice(ks, n_ks, "ks")?;
        let sm = slice(sigma_mults, n_sigma, "sigma_mults")?;
        let specs = grid_specs(&Scheme::ALL, ks, sm, median_pairwise_distance(ds));
        put(out, MgrPool(build_pool(ds, &specs)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn mgr_pool_load(file: *const c_char, out: *mut *mut MgrPool) -> MgrStatus {
    guard(|| put(out, MgrPool(GraphPool::load(&path(file)?)?)))
}

#[no_mangle]
pub unsafe extern "C" fn mgr_pool_save(pool: *const MgrPool, file: *const c_char) -> MgrStatus {
    guard(|| Ok(obj(pool, "pool")?.0.save(&path(file)?)?))
}

#[no_mangle]
pub unsafe extern "C" fn mgr_pool_len(pool: *const MgrPool) -> usize {
    pool.as_ref().map_or(0, |p| p.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn mgr_pool_free(pool: *mut MgrPool) {
    free(pool)
}

/// Learns graph weights with ground-truth relevance at label depth `level`.
#[no_mangle]
pub unsafe extern "C" fn mgr_model_train(
    pool: *const MgrPool,
    ds: *const MgrDataset,
    level: usize,
    params: MgrParams,
    out: *mut *mut MgrModel,
) -> MgrStatus {
    guard(|| {
        let pool = &obj(pool, "pool")?.0;
        let ds = &obj(ds, "dataset")?.0;
        pool.check_dataset(ds)?;
        let y = relevance_matrix(ds, level)?;
        put(out, MgrModel(train_offline(pool, &y, &params.into())?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn mgr_model_load(file: *const c_char, out: *mut *mut MgrModel) -> MgrStatus {
    guard(|| put(out, MgrModel(RankModel::load(&path(file)?)?)))
}

#[no_mangle]
pub unsafe extern "C" fn mgr_model_save(model: *const MgrModel, file: *const c_char) -> MgrStatus {
    guard(|| Ok(obj(model, "model")?.0.save(&path(file)?)?))
}

/// Number of graph weights.
#[no_mangle]
pub unsafe extern "C" fn mgr_model_len(model: *const MgrModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.weights.len())
}

/// Copies the graph weights into `buf`, which must hold `mgr_model_len`
/// values.
#[no_mangle]
pub unsafe extern "C" fn mgr_model_weights(model: *const MgrModel, buf: *mut f64, len: usize) -> MgrStatus {
    guard(|| {
        let w = obj(model, "model")?.0.weights.as_slice();
        if len < w.len() {
            return Err(Fail(
                MgrStatus::Validation,
                format!("buffer holds {len}, need {}", w.len()),
            ));
        }
        if buf.is_null() {
            return Err(null("buffer"));
        }
        ptr::copy_nonoverlapping(w.as_ptr(), buf, w.len());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mgr_model_free(model: *mut MgrModel) {
    free(model)
}

/// Ranks `db` against the query vector `x0` (length `dim`) with the model's
/// graph weights. Only `alpha` and `ridge` of `params` are used.
#[no_mangle]
pub unsafe extern "C" fn mgr_rank_online(
    model: *const MgrModel,
    pool: *const MgrPool,
    db: *const MgrDataset,
    x0: *const f64,
    dim: usize,
    params: MgrParams,
    out: *mut *mut MgrRanking,
) -> MgrStatus {
    guard(|| {
        let model = &obj(model, "model")?.0;
        let pool = &obj(pool, "pool")?.0;
        let db = &obj(db, "dataset")?.0;
        let x0 = slice(x0, dim, "query")?;
        let ranker = OnlineRanker::new(model, pool, db, &params.into())?;
        put(out, MgrRanking(ranker.rank("query", x0)?))
    })
}

/// Cosine-similarity ranking, no graphs involved.
#[no_mangle]
pub unsafe extern "C" fn mgr_rank_pairwise(
    db: *const MgrDataset,
    x0: *const f64,
    dim: usize,
    out: *mut *mut MgrRanking,
) -> MgrStatus {
    guard(|| {
        let db = &obj(db, "dataset")?.0;
        let x0 = slice(x0, dim, "query")?;
        put(out, MgrRanking(rank_pairwise_baseline(db, "query", x0)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn mgr_ranking_len(r: *const MgrRanking) -> usize {
    r.as_ref().map_or(0, |r| r.0.len())
}

/// Copies the database indices in rank order into `order` and each item's
/// score (indexed by database position) into `scores`. Either buffer may be
/// null to skip it; non-null buffers must hold `mgr_ranking_len` values.
#[no_mangle]
pub unsafe extern "C" fn mgr_ranking_copy(
    r: *const MgrRanking,
    order: *mut usize,
    scores: *mut f64,
    len: usize,
) -> MgrStatus {
    guard(|| {
        let r = &obj(r, "ranking")?.0;
        if len < r.len() {
            return Err(Fail(
                MgrStatus::Validation,
                format!("buffer holds {len}, need {}", r.len()),
            ));
        }
        if !order.is_null() {
            ptr::copy_nonoverlapping(r.order.as_ptr(), order, r.len());
        }
        if !scores.is_null() {
            ptr::copy_nonoverlapping(r.scores.as_ptr(), scores, r.len());
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mgr_ranking_free(r: *mut MgrRanking) {
    free(r)
}
