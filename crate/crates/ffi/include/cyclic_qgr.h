#ifndef CYCLIC_QGR_H
#define CYCLIC_QGR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of every call.
 */
typedef enum CqgrStatus {
  CQGR_STATUS_OK = 0,
  CQGR_STATUS_NULL_POINTER = 1,
  CQGR_STATUS_INVALID_UTF8 = 2,
  CQGR_STATUS_INVALID_INSTANCE = 3,
  CQGR_STATUS_INVALID_POINT = 4,
  CQGR_STATUS_OUT_OF_RANGE = 5,
  CQGR_STATUS_BUDGET_EXCEEDED = 6,
  /**
   * A computation failed its own exactness checks.
   */
  CQGR_STATUS_COMPUTATION_FAILED = 7,
  /**
   * A verification suite found mismatches; the report is still returned.
   */
  CQGR_STATUS_MISMATCH = 8,
  /**
   * The output buffer is too small; the needed length is reported.
   */
  CQGR_STATUS_BUFFER_TOO_SMALL = 9,
  CQGR_STATUS_PANIC = 10,
} CqgrStatus;

/**
 * Which oracle suite `cqgr_verify` runs.
 */
typedef enum CqgrSuite {
  CQGR_SUITE_FIXPOINTS = 0,
  CQGR_SUITE_EDGES = 1,
  CQGR_SUITE_ABBV = 2,
  CQGR_SUITE_GRAPH = 3,
  CQGR_SUITE_ALL = 4,
} CqgrSuite;

/**
 * Opaque handle to one instance.
 */
typedef struct CqgrInstance CqgrInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Opens an instance from `n=<int>;blocks=<int>[,<int>…]` or its JSON form.
 * Refuses instances with more than `budget` fixed points (0 means no cap).
 *
 * # Safety
 * `instance` must be a NUL-terminated string; `handle` must be writable.
 */
enum CqgrStatus cqgr_instance_new(const char *instance,
                                  uint64_t budget,
                                  struct CqgrInstance **handle);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `handle` must come from `cqgr_instance_new` and not be used afterwards.
 */
void cqgr_instance_free(struct CqgrInstance *handle);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void cqgr_string_free(char *s);

/**
 * A static, human-readable description of a status code. Takes the raw
 * integer so that any value a caller holds is safe to pass.
 */
const char *cqgr_status_message(int32_t status);

/**
 * Number of torus fixed points.
 *
 * # Safety
 * `handle` must be a live handle; `count` must be writable.
 */
enum CqgrStatus cqgr_point_count(const struct CqgrInstance *handle, size_t *count);

/**
 * Name of the fixed point at `index` in canonical order (`I={…}` for a
 * single block, a box list otherwise).
 *
 * # Safety
 * `handle` must be a live handle; `label` must be writable.
 */
enum CqgrStatus cqgr_point_label(const struct CqgrInstance *handle, size_t index, char **label);

/**
 * Canonical index of a fixed point given as `I={…}` or a JSON box list.
 *
 * # Safety
 * `handle` must be a live handle, `point` NUL-terminated, `index` writable.
 */
enum CqgrStatus cqgr_point_index(const struct CqgrInstance *handle,
                                 const char *point,
                                 size_t *index);

/**
 * Dimension of the cell of the point at `index`.
 *
 * # Safety
 * `handle` must be a live handle; `dim` must be writable.
 */
enum CqgrStatus cqgr_cell_dim(const struct CqgrInstance *handle, size_t index, uint32_t *dim);

/**
 * Cell counts by dimension into `coeffs[0..capacity]`; `len` receives the
 * number of coefficients, also when the buffer is too small.
 *
 * # Safety
 * `handle` must be a live handle; `coeffs` must hold `capacity` values
 * (or be null when `capacity` is 0); `len` must be writable.
 */
enum CqgrStatus cqgr_poincare(const struct CqgrInstance *handle,
                              uint64_t *coeffs,
                              size_t capacity,
                              size_t *len);

/**
 * Number of GKM edges.
 *
 * # Safety
 * `handle` must be a live handle; `count` must be writable.
 */
enum CqgrStatus cqgr_edge_count(const struct CqgrInstance *handle, size_t *count);

/**
 * Endpoints and label of edge `k`. `label` may be null if not wanted.
 *
 * # Safety
 * `handle` must be a live handle; `src` and `dst` must be writable.
 */
enum CqgrStatus cqgr_edge(const struct CqgrInstance *handle,
                          size_t k,
                          size_t *src,
                          size_t *dst,
                          char **label);

/**
 * The GKM graph as a JSON document.
 *
 * # Safety
 * `handle` must be a live handle; `json` must be writable.
 */
enum CqgrStatus cqgr_graph_json(const struct CqgrInstance *handle, char **json);

/**
 * `p^x|_y` as an expanded polynomial, e.g. `t0 - t[0][1] + t[2][1]`.
 *
 * # Safety
 * `handle` must be a live handle; `value` must be writable.
 */
enum CqgrStatus cqgr_basis_restriction(const struct CqgrInstance *handle,
                                       size_t x,
                                       size_t y,
                                       char **value);

/**
 * The nonzero structure constants of `p^x · p^y` as a JSON array of
 * `{"z": index, "label": name, "c": polynomial}`, ascending by `z`.
 *
 * # Safety
 * `handle` must be a live handle; `json` must be writable.
 */
enum CqgrStatus cqgr_structure_constants_json(const struct CqgrInstance *handle,
                                              size_t x,
                                              size_t y,
                                              char **json);

/**
 * Runs an oracle suite (a `CqgrSuite` value) with the given candidate budget. Writes the JSON
 * report to `report` (if not null) and returns `Mismatch` when it failed.
 *
 * # Safety
 * `handle` must be a live handle; `report` must be null or writable.
 */
enum CqgrStatus cqgr_verify(const struct CqgrInstance *handle,
                            int32_t suite,
                            uint64_t budget,
                            char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CYCLIC_QGR_H */
