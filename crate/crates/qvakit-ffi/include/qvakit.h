#ifndef QVAKIT_H
#define QVAKIT_H

/* Generated by cbindgen from crates/qvakit-ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum QvaStatus {
  // Success.
  QVA_STATUS_OK = 0,
  // A required pointer argument was null.
  QVA_STATUS_NULL_POINTER = 1,
  // An argument or configuration was invalid.
  QVA_STATUS_INVALID_ARGUMENT = 2,
  // A numerical routine failed or a size limit was exceeded.
  QVA_STATUS_NUMERICAL = 3,
  // An output buffer was too small.
  QVA_STATUS_BUFFER_TOO_SMALL = 4,
  // An internal panic was caught.
  QVA_STATUS_PANIC = 5,
} QvaStatus;

// Opaque assembled ansatz.
typedef struct QvaAnsatz QvaAnsatz;

// Opaque mixer graph.
typedef struct QvaGraph QvaGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or null if none.
// The pointer stays valid until the next failing call on this thread.
const char *qva_last_error_message(void);

// Toolkit version as a static NUL-terminated string.
const char *qva_version(void);

// Closed-form walk coefficient of the Hamming graph `H(n, m)` at distance
// `d` and time `t`.
//
// # Safety
// `re` and `im` must be valid for writes.
enum QvaStatus qva_hamming_coefficient(size_t n,
                                       size_t m,
                                       size_t d,
                                       double t,
                                       double *re,
                                       double *im);

// Lexicographic rank of the sequence `s[0..len]` among the distinct
// permutations of its multiset.
//
// # Safety
// `s` must point to `len` readable values; `out` must be valid for writes.
enum QvaStatus qva_rank_in_multiset(const size_t *s, size_t len, uint64_t *out);

// Inverse of [`qva_rank_in_multiset`]: write the permutation of rank
// `rank` of the multiset with multiplicities `counts[0..m]` into
// `out[0..out_len]` (`out_len` must equal the multiset size).
//
// # Safety
// `counts` must point to `m` readable values and `out` to `out_len`
// writable values.
enum QvaStatus qva_unrank_in_multiset(uint64_t rank,
                                      const size_t *counts,
                                      size_t m,
                                      size_t *out,
                                      size_t out_len);

// Create the Hamming graph `H(n, m)`.
//
// # Safety
// `out` must be valid for writes; release the handle with
// [`qva_graph_free`].
enum QvaStatus qva_graph_hamming(size_t n, size_t m, struct QvaGraph **out);

// Create the complete graph `K_n`.
//
// # Safety
// `out` must be valid for writes.
enum QvaStatus qva_graph_complete(size_t n, struct QvaGraph **out);

// Create the constrained permutation graph of the multiset with
// multiplicities `counts[0..m]`.
//
// # Safety
// `counts` must point to `m` readable values; `out` must be valid for
// writes.
enum QvaStatus qva_graph_constrained_permutation(const size_t *counts,
                                                 size_t m,
                                                 struct QvaGraph **out);

// Create a complete K-partite graph with parts of `sizes[0..k]`.
//
// # Safety
// `sizes` must point to `k` readable values; `out` must be valid for
// writes.
enum QvaStatus qva_graph_kpartite(const size_t *sizes, size_t k, struct QvaGraph **out);

// Release a graph handle (null is ignored).
//
// # Safety
// `g` must be null or a handle from a `qva_graph_*` constructor that has
// not been freed.
void qva_graph_free(struct QvaGraph *g);

// Vertex count, maximum degree and diameter of a graph.
//
// # Safety
// `g` must be a live handle; the out-pointers must be valid for writes.
enum QvaStatus qva_graph_stats(const struct QvaGraph *g,
                               size_t *vertices,
                               size_t *degree,
                               size_t *diameter);

// Optimal walk time, convergence potential and subshell count of a graph
// (within the dense size limit) relative to `reference`.
//
// # Safety
// `g` must be a live handle; the out-pointers must be valid for writes.
enum QvaStatus qva_graph_convergence_potential(const struct QvaGraph *g,
                                               size_t reference,
                                               double *t_star,
                                               double *prob_star,
                                               size_t *subshells);

// Build an ansatz. `instance` is a builtin name (`schedule_a`,
// `schedule_b`), `synthetic:n:A:seed`, or a path to a JSON instance file;
// `algorithm` is a lowercase algorithm name such as `qmoa` or `qwoa_cs`.
//
// # Safety
// `instance` and `algorithm` must be NUL-terminated strings; `out` must be
// valid for writes. Release the handle with [`qva_ansatz_free`].
enum QvaStatus qva_ansatz_new(const char *instance,
                              const char *algorithm,
                              size_t p,
                              struct QvaAnsatz **out);

// Release an ansatz handle (null is ignored).
//
// # Safety
// `a` must be null or a live handle from [`qva_ansatz_new`].
void qva_ansatz_free(struct QvaAnsatz *a);

// Statevector dimension and parameter-vector length of an ansatz.
//
// # Safety
// `a` must be a live handle; the out-pointers must be valid for writes.
enum QvaStatus qva_ansatz_shape(const struct QvaAnsatz *a, size_t *dim, size_t *num_params);

// Evolve with parameters `theta[0..len]` and report the expectation value
// and approximation ratio.
//
// # Safety
// `a` must be a live handle, `theta` must point to `len` readable values,
// and the out-pointers must be valid for writes.
enum QvaStatus qva_ansatz_evaluate(const struct QvaAnsatz *a,
                                   const double *theta,
                                   size_t len,
                                   double *expectation_out,
                                   double *ratio_out);

// Evolve with parameters `theta[0..len]` and write the statevector's real
// and imaginary parts into `re[0..dim]` and `im[0..dim]`.
//
// # Safety
// `a` must be a live handle; `theta` must point to `len` readable values;
// `re` and `im` must each point to `dim` writable values.
enum QvaStatus qva_ansatz_evolve(const struct QvaAnsatz *a,
                                 const double *theta,
                                 size_t len,
                                 double *re,
                                 double *im,
                                 size_t dim);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QVAKIT_H */
