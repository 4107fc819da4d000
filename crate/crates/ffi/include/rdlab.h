#ifndef RDLAB_H
#define RDLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum rdlab_status {
  RDLAB_STATUS_OK = 0,
  RDLAB_STATUS_NULL_POINTER = 1,
  RDLAB_STATUS_INVALID_ARGUMENT = 2,
  RDLAB_STATUS_BUFFER_TOO_SMALL = 3,
  RDLAB_STATUS_EXHAUSTED = 4,
  RDLAB_STATUS_NUMERICAL = 5,
  RDLAB_STATUS_PANIC = 6,
} rdlab_status;

/**
 * Opaque d-regular digraph.
 */
typedef struct rdlab_digraph rdlab_digraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *rdlab_version(void);

/**
 * Length in bytes of the last error message on this thread, without the
 * terminating NUL.
 */
size_t rdlab_last_error_length(void);

/**
 * Copies the last error message into `buf` as a NUL-terminated string.
 * Needs `len > rdlab_last_error_length()`.
 *
 * # Safety
 * `buf` must be valid for `len` bytes of writes.
 */
enum rdlab_status rdlab_last_error_message(char *buf, size_t len);

/**
 * Samples an (approximately) uniform d-regular digraph on n vertices from
 * the stream (seed, stream).
 *
 * # Safety
 * `out` must be valid for one pointer write.
 */
enum rdlab_status rdlab_digraph_sample(size_t n,
                                       size_t d,
                                       uint64_t seed,
                                       uint64_t stream,
                                       struct rdlab_digraph **out);

/**
 * Builds a digraph from `n * d` out-neighbour indices, row by row.
 *
 * # Safety
 * `out_adj` must be valid for `n * d` reads and `out` for one pointer write.
 */
enum rdlab_status rdlab_digraph_from_out_adj(size_t n,
                                             size_t d,
                                             const size_t *out_adj,
                                             struct rdlab_digraph **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `g` must be null or a handle not yet freed.
 */
void rdlab_digraph_free(struct rdlab_digraph *g);

/**
 * Number of vertices, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t rdlab_digraph_n(const struct rdlab_digraph *g);

/**
 * Degree, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t rdlab_digraph_d(const struct rdlab_digraph *g);

/**
 * Writes whether the edge i -> j is present.
 *
 * # Safety
 * `g` must be a live handle and `out` valid for one write.
 */
enum rdlab_status rdlab_digraph_has_edge(const struct rdlab_digraph *g,
                                         size_t i,
                                         size_t j,
                                         bool *out);

/**
 * Copies the d sorted out-neighbours of vertex i into `buf`.
 *
 * # Safety
 * `g` must be a live handle and `buf` valid for `len` writes.
 */
enum rdlab_status rdlab_digraph_out_neighbors(const struct rdlab_digraph *g,
                                              size_t i,
                                              size_t *buf,
                                              size_t len);

/**
 * Number of common out-neighbours of two distinct vertices.
 *
 * # Safety
 * `g` must be a live handle and `out` valid for one write.
 */
enum rdlab_status rdlab_digraph_codegree(const struct rdlab_digraph *g,
                                         size_t i1,
                                         size_t i2,
                                         size_t *out);

/**
 * Eigenvalues of the adjacency matrix, or of A / sqrt(d) when `normalized`,
 * written as n real and n imaginary parts in LAPACK order.
 *
 * # Safety
 * `g` must be a live handle; `re` and `im` must be valid for `len` writes.
 */
enum rdlab_status rdlab_digraph_eigenvalues(const struct rdlab_digraph *g,
                                            bool normalized,
                                            double *re,
                                            double *im,
                                            size_t len);

/**
 * Exact number of d-regular digraphs on n labelled vertices, n <= 6.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum rdlab_status rdlab_count_regular(size_t n, size_t d, uint64_t *out);

/**
 * Samples an n x n Bernoulli(p) matrix from (seed, stream) and reports
 * whether it contains a d-regular factor.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum rdlab_status rdlab_bernoulli_has_factor(size_t n,
                                             double p,
                                             size_t d,
                                             uint64_t seed,
                                             uint64_t stream,
                                             bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RDLAB_H */
