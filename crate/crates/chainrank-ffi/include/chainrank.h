#ifndef CHAINRANK_H
#define CHAINRANK_H

/* Generated by cbindgen from chainrank-ffi; regenerate instead of editing. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call in this API.
 */
typedef enum {
  CHAINRANK_STATUS_OK = 0,
  /**
   * An item id is empty, contains whitespace, or is duplicated.
   */
  CHAINRANK_STATUS_BAD_ID,
  CHAINRANK_STATUS_DIM_MISMATCH,
  CHAINRANK_STATUS_NON_FINITE,
  CHAINRANK_STATUS_ZERO_NORM,
  CHAINRANK_STATUS_BAD_MATRIX,
  CHAINRANK_STATUS_SHAPE_MISMATCH,
  CHAINRANK_STATUS_LABEL_MISMATCH,
  CHAINRANK_STATUS_EMPTY_GALLERY,
  CHAINRANK_STATUS_BAD_CONFIG,
  CHAINRANK_STATUS_NOT_PERMUTATION,
  CHAINRANK_STATUS_NO_RELEVANT,
  /**
   * An item is missing from the ground truth, or lacks a frame index.
   */
  CHAINRANK_STATUS_MISSING_TRUTH,
  CHAINRANK_STATUS_BAD_TRUTH,
  CHAINRANK_STATUS_FORMAT,
  CHAINRANK_STATUS_IO,
  /**
   * A required pointer argument was null.
   */
  CHAINRANK_STATUS_NULL_POINTER,
  /**
   * A string argument was not valid UTF-8.
   */
  CHAINRANK_STATUS_UTF8,
  /**
   * An index argument was out of range.
   */
  CHAINRANK_STATUS_OUT_OF_RANGE,
  /**
   * The implementation panicked; state is still consistent.
   */
  CHAINRANK_STATUS_INTERNAL,
} ChainrankStatus;

/**
 * Ranking method used by `chainrank_mine_chains`.
 */
typedef enum {
  /**
   * Sliding window over the last `window` retrieved items.
   */
  CHAINRANK_VARIANT_LOCAL = 0,
  /**
   * All retrieved items plus the query.
   */
  CHAINRANK_VARIANT_GLOBAL = 1,
} ChainrankVariant;

typedef struct ChainrankEmbeddings ChainrankEmbeddings;

typedef struct ChainrankMatrix ChainrankMatrix;

typedef struct ChainrankRanking ChainrankRanking;

typedef struct ChainrankReport ChainrankReport;

typedef struct ChainrankTruth ChainrankTruth;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread. Borrowed pointer;
 * never free it, and do not hold it across further failing calls.
 */
const char *chainrank_last_error_message(void);

/**
 * Releases a string returned by this API. NULL is tolerated.
 */
void chainrank_string_free(char *s);

/**
 * Builds a distance matrix from row-major `values` of size `rows * cols`.
 * Values must be finite and non-negative; when the two label lists are
 * identical the diagonal is forced to zero.
 */
ChainrankStatus chainrank_matrix_new(const char *const *row_ids,
                                     size_t rows,
                                     const char *const *col_ids,
                                     size_t cols,
                                     const double *values,
                                     ChainrankMatrix **out);

size_t chainrank_matrix_rows(const ChainrankMatrix *matrix);

size_t chainrank_matrix_cols(const ChainrankMatrix *matrix);

ChainrankStatus chainrank_matrix_get(const ChainrankMatrix *matrix,
                                     size_t row,
                                     size_t col,
                                     double *out_value);

/**
 * Copies all values row-major into `out_values`, which must hold exactly
 * `rows * cols` doubles.
 */
ChainrankStatus chainrank_matrix_copy_values(const ChainrankMatrix *matrix,
                                             double *out_values,
                                             size_t len);

/**
 * Row label at `index`; NULL when out of range. Free with
 * `chainrank_string_free`.
 */
char *chainrank_matrix_row_id(const ChainrankMatrix *matrix, size_t index);

/**
 * Column label at `index`; NULL when out of range. Free with
 * `chainrank_string_free`.
 */
char *chainrank_matrix_col_id(const ChainrankMatrix *matrix, size_t index);

void chainrank_matrix_free(ChainrankMatrix *matrix);

/**
 * Builds an embedding set from `count` vectors of `dim` doubles, stored
 * row-major in `vectors`.
 */
ChainrankStatus chainrank_embeddings_new(size_t dim,
                                         const char *const *ids,
                                         size_t count,
                                         const double *vectors,
                                         ChainrankEmbeddings **out);

size_t chainrank_embeddings_count(const ChainrankEmbeddings *set);

size_t chainrank_embeddings_dim(const ChainrankEmbeddings *set);

void chainrank_embeddings_free(ChainrankEmbeddings *set);

ChainrankStatus chainrank_euclidean_distances(const ChainrankEmbeddings *rows,
                                              const ChainrankEmbeddings *cols,
                                              ChainrankMatrix **out);

ChainrankStatus chainrank_cosine_distances(const ChainrankEmbeddings *rows,
                                           const ChainrankEmbeddings *cols,
                                           ChainrankMatrix **out);

/**
 * Generates the drifting-identity dataset: one query per identity (frame 0),
 * the remaining frames as gallery, and ground truth with frame indices.
 */
ChainrankStatus chainrank_synth(size_t num_identities,
                                size_t frames_per_identity,
                                size_t dim,
                                double step_sigma,
                                double center_sigma,
                                double noise_sigma,
                                uint64_t seed,
                                ChainrankEmbeddings **out_queries,
                                ChainrankEmbeddings **out_gallery,
                                ChainrankTruth **out_truth);

/**
 * Builds ground truth from parallel arrays. `frames[i] < 0` marks an item
 * without a frame index.
 */
ChainrankStatus chainrank_truth_new(const char *const *ids,
                                    const char *const *identities,
                                    const int64_t *frames,
                                    size_t count,
                                    ChainrankTruth **out);

void chainrank_truth_free(ChainrankTruth *truth);

ChainrankStatus chainrank_direct_ranking(const ChainrankMatrix *qg, ChainrankRanking **out);

/**
 * Chain retrieval over `qg` (query rows) and `gg` (gallery self-distances,
 * labels matching the columns of `qg`). `window` is ignored by the global
 * variant, which always keeps the query in the participant set.
 */
ChainrankStatus chainrank_mine_chains(const ChainrankMatrix *qg,
                                      const ChainrankMatrix *gg,
                                      ChainrankVariant variant,
                                      size_t window,
                                      bool with_ref,
                                      bool mean_aggregation,
                                      ChainrankRanking **out);

/**
 * Fuses `count` rankings with their query-gallery matrices (parallel
 * arrays, same label spaces, same order).
 */
ChainrankStatus chainrank_fuse(const ChainrankRanking *const *rankings,
                               const ChainrankMatrix *const *matrices,
                               size_t count,
                               bool normalize,
                               ChainrankRanking **out);

/**
 * Refines `qg` with k-reciprocal re-ranking; `qq` and `gg` are the query
 * and gallery self-distance matrices.
 */
ChainrankStatus chainrank_rerank(const ChainrankMatrix *qg,
                                 const ChainrankMatrix *qq,
                                 const ChainrankMatrix *gg,
                                 size_t k1,
                                 size_t k2,
                                 double lambda,
                                 ChainrankMatrix **out);

size_t chainrank_ranking_query_count(const ChainrankRanking *ranking);

size_t chainrank_ranking_gallery_count(const ChainrankRanking *ranking);

/**
 * Copies one query's ranked gallery positions into `out_positions`, which
 * must hold exactly the gallery count.
 */
ChainrankStatus chainrank_ranking_positions(const ChainrankRanking *ranking,
                                            size_t query,
                                            size_t *out_positions,
                                            size_t len);

/**
 * Query label at `query`; NULL when out of range. Free with
 * `chainrank_string_free`.
 */
char *chainrank_ranking_query_id(const ChainrankRanking *ranking, size_t query);

/**
 * Gallery label retrieved at `position` for `query`; NULL when out of
 * range. Free with `chainrank_string_free`.
 */
char *chainrank_ranking_item_id(const ChainrankRanking *ranking, size_t query, size_t position);

void chainrank_ranking_free(ChainrankRanking *ranking);

ChainrankStatus chainrank_evaluate(const ChainrankRanking *ranking,
                                   const ChainrankTruth *truth,
                                   ChainrankReport **out);

/**
 * Mean average precision; NaN when `report` is NULL.
 */
double chainrank_report_map(const ChainrankReport *report);

ChainrankStatus chainrank_report_query_ap(const ChainrankReport *report,
                                          size_t query,
                                          double *out_value);

/**
 * Cumulative match rate at 1-based `rank` (fraction of queries whose first
 * relevant item appears within the top `rank`).
 */
ChainrankStatus chainrank_report_cmc(const ChainrankReport *report, size_t rank, double *out_value);

/**
 * Writes the order-consistency score and returns true, or returns false
 * when the metric is unavailable (frame data incomplete).
 */
bool chainrank_report_order_consistency(const ChainrankReport *report, double *out_value);

/**
 * Writes the mean Kendall tau and returns true, or returns false when no
 * query has enough same-identity items or frame data is incomplete.
 */
bool chainrank_report_kendall_tau(const ChainrankReport *report, double *out_value);

void chainrank_report_free(ChainrankReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHAINRANK_H */
