#ifndef MULTIG_RANK_H
#define MULTIG_RANK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MgrStatus {
  MGR_STATUS_OK = 0,
  MGR_STATUS_VALIDATION = 1,
  MGR_STATUS_NUMERICAL = 2,
  MGR_STATUS_IO = 3,
  MGR_STATUS_NULL_POINTER = 4,
  MGR_STATUS_PANIC = 5,
} MgrStatus;

typedef struct MgrDataset MgrDataset;

typedef struct MgrModel MgrModel;

typedef struct MgrPool MgrPool;

typedef struct MgrRanking MgrRanking;

/**
 * Hyper-parameters for training and online ranking.
 */
typedef struct MgrParams {
  double alpha;
  double beta;
  size_t max_iters;
  double ridge;
  double tol;
} MgrParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next `mgr_*` call on the same thread.
 */
const char *mgr_last_error(void);

/**
 * Defaults: alpha 1, beta 1, 20 iterations, ridge 1e-8, tol 0.
 */
struct MgrParams mgr_params_default(void);

/**
 * Loads a `.csv` or `.json` dataset.
 */
enum MgrStatus mgr_dataset_load(const char *file, struct MgrDataset **out);

enum MgrStatus mgr_dataset_generate(size_t n_classes,
                                    size_t per_class,
                                    size_t dim,
                                    double spread,
                                    double separation,
                                    uint64_t seed,
                                    struct MgrDataset **out);

/**
 * Number of records; 0 for a null handle.
 */
size_t mgr_dataset_len(const struct MgrDataset *ds);

size_t mgr_dataset_dim(const struct MgrDataset *ds);

void mgr_dataset_free(struct MgrDataset *ds);

/**
 * Pool over all five schemes for every `k` in `ks`; gaussian graphs get one
 * bandwidth per entry of `sigma_mults`, scaled by the median pairwise
 * distance.
 */
enum MgrStatus mgr_pool_build(const struct MgrDataset *ds,
                              const size_t *ks,
                              size_t n_ks,
                              const double *sigma_mults,
                              size_t n_sigma,
                              struct MgrPool **out);

enum MgrStatus mgr_pool_load(const char *file, struct MgrPool **out);

enum MgrStatus mgr_pool_save(const struct MgrPool *pool, const char *file);

size_t mgr_pool_len(const struct MgrPool *pool);

void mgr_pool_free(struct MgrPool *pool);

/**
 * Learns graph weights with ground-truth relevance at label depth `level`.
 */
enum MgrStatus mgr_model_train(const struct MgrPool *pool,
                               const struct MgrDataset *ds,
                               size_t level,
                               struct MgrParams params,
                               struct MgrModel **out);

enum MgrStatus mgr_model_load(const char *file, struct MgrModel **out);

enum MgrStatus mgr_model_save(const struct MgrModel *model, const char *file);

/**
 * Number of graph weights.
 */
size_t mgr_model_len(const struct MgrModel *model);

/**
 * Copies the graph weights into `buf`, which must hold `mgr_model_len`
 * values.
 */
enum MgrStatus mgr_model_weights(const struct MgrModel *model, double *buf, size_t len);

void mgr_model_free(struct MgrModel *model);

/**
 * Ranks `db` against the query vector `x0` (length `dim`) with the model's
 * graph weights. Only `alpha` and `ridge` of `params` are used.
 */
enum MgrStatus mgr_rank_online(const struct MgrModel *model,
                               const struct MgrPool *pool,
                               const struct MgrDataset *db,
                               const double *x0,
                               size_t dim,
                               struct MgrParams params,
                               struct MgrRanking **out);

/**
 * Cosine-similarity ranking, no graphs involved.
 */
enum MgrStatus mgr_rank_pairwise(const struct MgrDataset *db,
                                 const double *x0,
                                 size_t dim,
                                 struct MgrRanking **out);

size_t mgr_ranking_len(const struct MgrRanking *r);

/**
 * Copies the database indices in rank order into `order` and each item's
 * score (indexed by database position) into `scores`. Either buffer may be
 * null to skip it; non-null buffers must hold `mgr_ranking_len` values.
 */
enum MgrStatus mgr_ranking_copy(const struct MgrRanking *r,
                                size_t *order,
                                double *scores,
                                size_t len);

void mgr_ranking_free(struct MgrRanking *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MULTIG_RANK_H */
