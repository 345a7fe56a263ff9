#ifndef PERMINT_H
#define PERMINT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of every call.
 */
typedef enum PmiStatus {
  PMI_STATUS_OK = 0,
  PMI_STATUS_NULL_POINTER = 1,
  PMI_STATUS_INVALID_ARGUMENT = 2,
  PMI_STATUS_DOMAIN = 3,
  PMI_STATUS_CAPACITY = 4,
  PMI_STATUS_PARSE = 5,
  PMI_STATUS_EMPTY_FAMILY = 6,
  PMI_STATUS_BUFFER_TOO_SMALL = 7,
  PMI_STATUS_INTERNAL = 8,
  PMI_STATUS_PANIC = 9,
} PmiStatus;

/**
 * Which table [`pmi_bounds_table`] renders.
 */
typedef enum PmiTable {
  PMI_TABLE_MAIN = 0,
  PMI_TABLE_TIGHTNESS = 1,
  PMI_TABLE_STABILITY = 2,
  PMI_TABLE_AGREEMENT = 3,
  PMI_TABLE_FIXED_POINTS = 4,
  PMI_TABLE_CONSTRUCTIONS = 5,
} PmiTable;

/**
 * A family of permutations of `S_n`, `n ≤ 8`.
 */
typedef struct PmiFamily PmiFamily;

/**
 * The pair and value found by [`pmi_search`].
 */
typedef struct PmiSearch PmiSearch;

/**
 * Monte Carlo coverage of an embedded family.
 */
typedef struct PmiCoverage {
  uint64_t samples;
  uint64_t hits;
  double estimate;
  double std_error;
  double r;
  /**
   * Meaningful only when `bound_defined`.
   */
  double theorem_bound;
  bool bound_defined;
  bool vacuous;
} PmiCoverage;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The library version as a static NUL-terminated string.
 */
const char *pmi_version(void);

/**
 * Copies the calling thread's last error message into `buf`
 * (see the buffer convention on [`pmi_bounds_table`]).
 *
 * # Safety
 * `buf` must be writable for `cap` bytes; `len` must be writable.
 */
enum PmiStatus pmi_last_error(char *buf, size_t cap, size_t *len);

/**
 * The empty family on `S_n`.
 *
 * # Safety
 * `out` must be writable.
 */
enum PmiStatus pmi_family_empty(size_t n, struct PmiFamily **out);

/**
 * All of `S_n`.
 *
 * # Safety
 * `out` must be writable.
 */
enum PmiStatus pmi_family_full(size_t n, struct PmiFamily **out);

/**
 * The umvirate sending `inputs[k]` to `outputs[k]` for `k < len`.
 *
 * # Safety
 * `inputs` and `outputs` must be readable for `len` values; `out` writable.
 */
enum PmiStatus pmi_family_umvirate(size_t n,
                                   const uint32_t *inputs,
                                   const uint32_t *outputs,
                                   size_t len,
                                   struct PmiFamily **out);

/**
 * Parses the text or JSON family format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` writable.
 */
enum PmiStatus pmi_family_parse(const char *text, struct PmiFamily **out);

/**
 * Renders a family in the text format.
 *
 * # Safety
 * `f` must be a live handle; `buf` writable for `cap` bytes; `len` writable.
 */
enum PmiStatus pmi_family_emit(const struct PmiFamily *f, char *buf, size_t cap, size_t *len);

/**
 * Adds the permutation with one-based `images[0..n]`.
 *
 * # Safety
 * `f` must be a live handle; `images` readable for `n` values.
 */
enum PmiStatus pmi_family_insert(struct PmiFamily *f, const uint32_t *images, size_t n);

/**
 * # Safety
 * `f` must be a live handle; `out` writable.
 */
enum PmiStatus pmi_family_len(const struct PmiFamily *f, size_t *out);

/**
 * # Safety
 * `f` must be a live handle; `out` writable.
 */
enum PmiStatus pmi_family_n(const struct PmiFamily *f, size_t *out);

/**
 * Writes the `index`-th member (rank order) into `images[0..n]`.
 *
 * # Safety
 * `f` must be a live handle; `images` writable for `cap` values.
 */
enum PmiStatus pmi_family_member(const struct PmiFamily *f,
                                 size_t index,
                                 uint32_t *images,
                                 size_t cap);

/**
 * Releases a family; null is ignored.
 *
 * # Safety
 * `f` must be null or a handle not yet freed.
 */
void pmi_family_free(struct PmiFamily *f);

/**
 * Number of positions where two permutations of `S_n` agree.
 *
 * # Safety
 * `a` and `b` readable for `n` values; `out` writable.
 */
enum PmiStatus pmi_intersection_size(const uint32_t *a, const uint32_t *b, size_t n, size_t *out);

/**
 * Whether no `σ ∈ F`, `τ ∈ G` agree on exactly `t − 1` positions.
 *
 * # Safety
 * `f`, `g` live handles; `out` writable.
 */
enum PmiStatus pmi_is_cross_free(const struct PmiFamily *f,
                                 const struct PmiFamily *g,
                                 size_t t,
                                 bool *out);

/**
 * Maximizes `|F||G|` over cross-free pairs: exhaustively when `exact`
 * (`n ≤ 4`), otherwise by branch and bound within `budget` nodes.
 *
 * # Safety
 * `out` must be writable.
 */
enum PmiStatus pmi_search(size_t n, size_t t, bool exact, uint64_t budget, struct PmiSearch **out);

/**
 * `|F||G|`, and whether it is certified optimal.
 *
 * # Safety
 * `s` a live handle; `product` and `optimal` writable.
 */
enum PmiStatus pmi_search_product(const struct PmiSearch *s, uint64_t *product, bool *optimal);

/**
 * A new handle holding `F` (`which == 0`) or `G` (`which == 1`).
 *
 * # Safety
 * `s` a live handle; `out` writable.
 */
enum PmiStatus pmi_search_family(const struct PmiSearch *s, uint32_t which, struct PmiFamily **out);

/**
 * # Safety
 * `s` must be null or a handle not yet freed.
 */
void pmi_search_free(struct PmiSearch *s);

/**
 * Renders a bound table as TSV (`label, params, value, log2`) with exact
 * values. `t` and `r` are read only by the tables that need them.
 *
 * Buffer convention: `*len` always receives the text length; the text is
 * written with a trailing NUL only when `cap > len`, otherwise the status
 * is `BufferTooSmall`.
 *
 * # Safety
 * `buf` writable for `cap` bytes; `len` writable.
 */
enum PmiStatus pmi_bounds_table(enum PmiTable table,
                                size_t n,
                                size_t t,
                                size_t r,
                                char *buf,
                                size_t cap,
                                size_t *len);

/**
 * Level weights `‖f^{=d}‖²` of the family's indicator, `d = 0..n−1`.
 * `*len` receives `n`; weights are written when `cap ≥ n`.
 *
 * # Safety
 * `f` a live handle; `weights` writable for `cap` values; `len` writable.
 */
enum PmiStatus pmi_decompose_weights(const struct PmiFamily *f,
                                     double *weights,
                                     size_t cap,
                                     size_t *len);

/**
 * Coverage of the embedded family by `(m·delta)`-random subsets, with
 * depth-3 spreadness feeding the bound.
 *
 * # Safety
 * `f` a live handle; `out` writable.
 */
enum PmiStatus pmi_coverage(const struct PmiFamily *f,
                            size_t m,
                            double delta,
                            uint64_t samples,
                            uint64_t seed,
                            struct PmiCoverage *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PERMINT_H */
