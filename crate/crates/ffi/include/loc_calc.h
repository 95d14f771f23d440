#ifndef LOC_CALC_H
#define LOC_CALC_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum LcStatus {
  LC_STATUS_OK = 0,
  // A required pointer argument was null.
  LC_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  LC_STATUS_INVALID_UTF8 = 2,
  // An expression failed to parse.
  LC_STATUS_PARSE = 3,
  // An argument or model file is malformed.
  LC_STATUS_INVALID_ARGUMENT = 4,
  // A zero is degenerate or a denominator vanishes.
  LC_STATUS_DEGENERATE = 5,
  // The model lacks bundle or twist data the call needs.
  LC_STATUS_MISSING_DATA = 6,
  // Quadrature produced a non-finite value.
  LC_STATUS_NUMERIC = 7,
  // Reading or writing a file failed.
  LC_STATUS_IO = 8,
  // The library panicked; this is a bug.
  LC_STATUS_PANIC = 9,
} LcStatus;

// Opaque model handle.
typedef struct LcModel LcModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null after a success.
// The pointer stays valid until the next call on the same thread.
const char *lc_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed already.
void lc_string_free(char *s);

// ℙⁿ with the standard torus field. `weights` points at `n + 1` integers,
// or is null for symbolic weights `l0 … ln`.
//
// # Safety
// `weights` must be null or valid for `n + 1` reads; `out` must be writable.
enum LcStatus lc_model_projective_space(size_t n, const int64_t *weights, struct LcModel **out);

// Reads a JSON model file.
//
// # Safety
// `path` must be a nul-terminated string; `out` must be writable.
enum LcStatus lc_model_load(const char *path, struct LcModel **out);

// Writes a model as JSON.
//
// # Safety
// `model` must be a live handle and `path` a nul-terminated string.
enum LcStatus lc_model_save(const struct LcModel *model, const char *path);

// Releases a model. Null is ignored.
//
// # Safety
// `model` must come from this library and not have been freed already.
void lc_model_free(struct LcModel *model);

// Number of zeroes of the model's field.
//
// # Safety
// `model` must be a live handle; `out` must be writable.
enum LcStatus lc_model_num_points(const struct LcModel *model, size_t *out);

// Complex dimension of the model.
//
// # Safety
// `model` must be a live handle; `out` must be writable.
enum LcStatus lc_model_dim(const struct LcModel *model, size_t *out);

// Bott sum of a Chern polynomial in `c1 … cn`. The value is written as an
// owned string; `out_tau` and `out_t` (nullable) receive the exponents of
// `2πi` and `t` that multiply it.
//
// # Safety
// `model` must be a live handle, `phi` a nul-terminated string and
// `out_value` writable; `out_tau`/`out_t` may be null.
enum LcStatus lc_bott_sum(const struct LcModel *model,
                          const char *phi,
                          char **out_value,
                          int *out_tau,
                          int *out_t);

// Carrell–Liebermann sum of a polynomial in the bundle classes.
//
// # Safety
// As for [`lc_bott_sum`].
enum LcStatus lc_carrell_liebermann_sum(const struct LcModel *model,
                                        const char *p,
                                        char **out_value,
                                        int *out_tau,
                                        int *out_t);

// Baum–Bott sum of a polynomial in `g1 … gn`; every point needs a twist weight.
//
// # Safety
// As for [`lc_bott_sum`].
enum LcStatus lc_baum_bott_sum(const struct LcModel *model,
                               const char *phi,
                               char **out_value,
                               int *out_tau,
                               int *out_t);

// Writes 1 to `out_is_zero` when `Σ 1/det J` vanishes identically, else 0.
//
// # Safety
// `model` must be a live handle; `out_is_zero` must be writable.
enum LcStatus lc_zero_sum_identity(const struct LcModel *model, int *out_is_zero);

// Numeric residue at the origin of `s / (a₁⋯a_n)`, with components and
// numerator given as expressions in `z1 … zn` (and `i`).
//
// # Safety
// `components` must point at `n` nul-terminated strings, `numerator` must
// be nul-terminated, and `out_re`/`out_im` writable.
enum LcStatus lc_residue_contour(size_t n,
                                 const char *const *components,
                                 const char *numerator,
                                 double radius,
                                 size_t samples,
                                 double *out_re,
                                 double *out_im);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOC_CALC_H */
