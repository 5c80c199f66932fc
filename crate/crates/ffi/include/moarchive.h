#ifndef MOARCHIVE_H
#define MOARCHIVE_H

#include <stdbool.h>
#include <stddef.h>

/**
 * Status codes returned by every function.
 */
typedef enum {
  MOA_STATUS_OK = 0,
  MOA_STATUS_NULL_POINTER = 1,
  MOA_STATUS_INVALID_UTF8 = 2,
  MOA_STATUS_INVALID_JSON = 3,
  MOA_STATUS_USAGE = 4,
  MOA_STATUS_DOMAIN = 5,
  MOA_STATUS_OUT_OF_RANGE = 6,
  MOA_STATUS_PANIC = 7,
} MoaStatus;

/**
 * Opaque archiver handle.
 */
typedef struct MoaArchiver MoaArchiver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or NULL. The
 * pointer stays valid until the next failing call on this thread.
 */
const char *moa_last_error(void);

/**
 * Creates an archiver from a JSON configuration (with explicit indicator
 * settings) for `dim` objectives and stores the handle in `*out`.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string and `out` a valid pointer.
 */
MoaStatus moa_archiver_new(const char *config_json, size_t dim, MoaArchiver **out);

/**
 * Releases an archiver. NULL is ignored.
 *
 * # Safety
 * `archiver` must come from [`moa_archiver_new`] and not be used again.
 */
void moa_archiver_free(MoaArchiver *archiver);

/**
 * Offers `count` solutions as one batch.
 *
 * # Safety
 * `archiver` must be a live handle and `values` hold `count * dim` doubles.
 */
MoaStatus moa_archiver_push_batch(MoaArchiver *archiver,
                                  const double *values,
                                  size_t count,
                                  size_t dim);

/**
 * Offers one solution of `dim` objectives.
 *
 * # Safety
 * As [`moa_archiver_push_batch`] with `count = 1`.
 */
MoaStatus moa_archiver_push(MoaArchiver *archiver, const double *values, size_t dim);

/**
 * Stores the number of archive members in `*out_len`.
 *
 * # Safety
 * `archiver` must be a live handle and `out_len` a valid pointer.
 */
MoaStatus moa_archiver_len(const MoaArchiver *archiver, size_t *out_len);

/**
 * Copies member `index` into `out_values`, which must hold `dim` doubles.
 *
 * # Safety
 * `archiver` must be a live handle and `out_values` hold `dim` doubles.
 */
MoaStatus moa_archiver_member(const MoaArchiver *archiver,
                              size_t index,
                              double *out_values,
                              size_t dim);

/**
 * Hypervolume of `count` points with respect to `reference`.
 *
 * # Safety
 * `points` must hold `count * dim` doubles, `reference` `dim` doubles and
 * `out` be a valid pointer.
 */
MoaStatus moa_hypervolume(const double *points,
                          size_t count,
                          size_t dim,
                          const double *reference,
                          double *out);

/**
 * Whether set `a` is better than set `b`: `a` weakly dominates `b` but
 * not the other way round.
 *
 * # Safety
 * `a` must hold `a_count * dim` doubles, `b` `b_count * dim` doubles and
 * `out` be a valid pointer.
 */
MoaStatus moa_better(const double *a,
                     size_t a_count,
                     const double *b,
                     size_t b_count,
                     size_t dim,
                     bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MOARCHIVE_H */
