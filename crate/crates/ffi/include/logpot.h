#ifndef LOGPOT_H
#define LOGPOT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Lattice-compatible half-plane normals.
typedef enum LpGridNormal {
  LP_GRID_NORMAL_POS_X = 0,
  LP_GRID_NORMAL_NEG_X = 1,
  LP_GRID_NORMAL_POS_Y = 2,
  LP_GRID_NORMAL_NEG_Y = 3,
  LP_GRID_NORMAL_POS_DIAG = 4,
  LP_GRID_NORMAL_NEG_DIAG = 5,
  LP_GRID_NORMAL_POS_ANTI = 6,
  LP_GRID_NORMAL_NEG_ANTI = 7,
} LpGridNormal;

// Result codes.
typedef enum LpStatus {
  LP_STATUS_OK = 0,
  LP_STATUS_NULL_POINTER = 1,
  LP_STATUS_INVALID_UTF8 = 2,
  // Bad input: shape, spacing, kernel, config, index.
  LP_STATUS_VALIDATION = 3,
  // An iterative method did not converge.
  LP_STATUS_NUMERICAL = 4,
  LP_STATUS_IO = 5,
  // The caller's buffer is shorter than the data.
  LP_STATUS_BUFFER_TOO_SMALL = 6,
  // A Rust panic was caught at the boundary.
  LP_STATUS_PANIC = 7,
} LpStatus;

// Opaque pixel mask.
typedef struct LpMask LpMask;

// Opaque extreme spectrum of a mask.
typedef struct LpSpectrum LpSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static NUL-terminated string.
const char *lp_version(void);

// Message of the last failed call on this thread, or null after a success.
// The pointer stays valid until the next call on the same thread.
const char *lp_last_error(void);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void lp_string_free(char *s);

// Rasterize a shape given as JSON or shorthand (`"disc:1"`) at spacing `h`.
//
// # Safety
// `shape` must be a NUL-terminated string and `out` a writable pointer.
enum LpStatus lp_mask_from_shape(const char *shape, double h, struct LpMask **out);

// Parse the mask text format.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a writable pointer.
enum LpStatus lp_mask_from_text(const char *text, struct LpMask **out);

// # Safety
// `mask` must be a live handle; `out` receives a string for [`lp_string_free`].
enum LpStatus lp_mask_to_text(const struct LpMask *mask, char **out);

// Number of active cells, 0 for a null handle.
//
// # Safety
// `mask` must be null or a live handle.
size_t lp_mask_cell_count(const struct LpMask *mask);

// Grid spacing, NaN for a null handle.
//
// # Safety
// `mask` must be null or a live handle.
double lp_mask_h(const struct LpMask *mask);

// Polarize across the lattice line `x . a = k q`, where `q` is `h/2` for
// axis normals and `h/sqrt 2` for diagonal ones. `normal` is an
// [`LpGridNormal`] value; it travels as an int so that an out-of-range value
// is an error rather than undefined behaviour.
//
// # Safety
// `mask` must be a live handle and `out` a writable pointer.
enum LpStatus lp_mask_polarize(const struct LpMask *mask,
                               int32_t normal,
                               int64_t k,
                               struct LpMask **out);

// Discrete Schwarz symmetrization.
//
// # Safety
// `mask` must be a live handle and `out` a writable pointer.
enum LpStatus lp_mask_schwarz(const struct LpMask *mask, struct LpMask **out);

// # Safety
// `mask` must be null or a handle not yet freed.
void lp_mask_free(struct LpMask *mask);

// The `topk` largest eigenvalues and the smallest one. `kernel` is `"log"`
// or `"riesz:<alpha>"`.
//
// # Safety
// `mask` must be a live handle, `kernel` a NUL-terminated string, `out` writable.
enum LpStatus lp_solve(const struct LpMask *mask,
                       const char *kernel,
                       size_t topk,
                       struct LpSpectrum **out);

// Number of top eigenvalues held, 0 for a null handle.
//
// # Safety
// `s` must be null or a live handle.
size_t lp_spectrum_top_count(const struct LpSpectrum *s);

// The `i`-th largest eigenvalue and its residual (`residual` may be null).
//
// # Safety
// `s` must be a live handle; `tau` writable; `residual` null or writable.
enum LpStatus lp_spectrum_top(const struct LpSpectrum *s, size_t i, double *tau, double *residual);

// The smallest eigenvalue and its residual (`residual` may be null).
//
// # Safety
// `s` must be a live handle; `tau` writable; `residual` null or writable.
enum LpStatus lp_spectrum_bottom(const struct LpSpectrum *s, double *tau, double *residual);

// Copy eigenvector `i` into `buf` (cell order of the mask, normalized so
// `h^2 sum v^2 = 1`). Index `top_count` selects the bottom eigenvector.
// `len` must be at least the cell count; `written` (nullable) receives it.
//
// # Safety
// `s` must be a live handle and `buf` valid for `len` doubles.
enum LpStatus lp_spectrum_vector(const struct LpSpectrum *s,
                                 size_t i,
                                 double *buf,
                                 size_t len,
                                 size_t *written);

// JSON summary of the spectrum, without vectors.
//
// # Safety
// `s` must be a live handle; `out` receives a string for [`lp_string_free`].
enum LpStatus lp_spectrum_to_json(const struct LpSpectrum *s, char **out);

// # Safety
// `s` must be null or a handle not yet freed.
void lp_spectrum_free(struct LpSpectrum *s);

// The three largest eigenvalues of the disc of radius `radius`, closed form.
//
// # Safety
// `out` must be valid for three doubles.
enum LpStatus lp_disc_top3(double radius, double *out);

// The negative eigenvalue of the disc; validation error for `radius <= 1`.
//
// # Safety
// `out` must be writable.
enum LpStatus lp_disc_negative(double radius, double *out);

// Transfinite diameter of a shape (JSON or shorthand).
//
// # Safety
// `shape` must be a NUL-terminated string and `out` writable.
enum LpStatus lp_tdiam(const char *shape, double *out);

// Run a named experiment (`"two_ball_sweep"`, ...) with a JSON config
// (null or empty for defaults). `report` receives the JSON report.
//
// # Safety
// `name` must be a NUL-terminated string, `config` null or one, `report` writable.
enum LpStatus lp_experiment_run(const char *name, const char *config, uint64_t seed, char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOGPOT_H */
