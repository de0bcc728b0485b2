#ifndef SPHERELAB_H
#define SPHERELAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SlStatus {
  SL_STATUS_OK = 0,
  SL_STATUS_NULL_POINTER = 1,
  SL_STATUS_INVALID_ARGUMENT = 2,
  SL_STATUS_BUDGET_EXCEEDED = 3,
  SL_STATUS_NUMERICAL = 4,
  SL_STATUS_CLUSTER = 5,
  SL_STATUS_PARSE = 6,
  SL_STATUS_IO = 7,
  SL_STATUS_BUFFER_TOO_SMALL = 8,
  SL_STATUS_PANIC = 9,
} SlStatus;

typedef enum SlVerdict {
  SL_VERDICT_EMPTY = 0,
  SL_VERDICT_NONEMPTY = 1,
  SL_VERDICT_UNDECIDED = 2,
} SlVerdict;

// Real spherical-harmonic expansion.
typedef struct SlExpansion SlExpansion;

// Region of the sphere built from caps.
typedef struct SlRegion SlRegion;

// Eigendecomposition of `−Δ/2 + V`.
typedef struct SlSpectrum SlSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. Valid until the next
// failing call on the same thread.
const char *sl_last_error(void);

// Library version as a static NUL-terminated string.
const char *sl_version(void);

// Builds an expansion from `n` terms `coef[i]·Y_{l[i], m[i]}`.
//
// # Safety
// The three arrays must hold `n` elements; `out` must be writable.
enum SlStatus sl_expansion_from_terms(const size_t *l,
                                      const int64_t *m,
                                      const double *coef,
                                      size_t n,
                                      struct SlExpansion **out);

// # Safety
// `v` must come from this library or be null.
void sl_expansion_free(struct SlExpansion *v);

// # Safety
// `v` must be a live expansion and `out` writable.
enum SlStatus sl_expansion_evaluate(const struct SlExpansion *v,
                                    double x,
                                    double y,
                                    double z,
                                    double *out);

// Great-circle average of `v` over the circle with normal `(x, y, z)`.
//
// # Safety
// `v` must be a live expansion and `out` writable.
enum SlStatus sl_radon(const struct SlExpansion *v, double x, double y, double z, double *out);

// Assembles and diagonalizes `−Δ/2 + V` on degrees `≤ l_max`.
//
// # Safety
// `v` must be a live expansion and `out` writable.
enum SlStatus sl_spectrum_compute(const struct SlExpansion *v,
                                  size_t l_max,
                                  struct SlSpectrum **out);

// # Safety
// `s` must come from this library or be null.
void sl_spectrum_free(struct SlSpectrum *s);

// Number of eigenvalues, or 0 for a null handle.
//
// # Safety
// `s` must be a live spectrum or null.
size_t sl_spectrum_len(const struct SlSpectrum *s);

// Copies the ascending eigenvalues into `buf` of capacity `cap`.
//
// # Safety
// `s` must be a live spectrum and `buf` hold `cap` doubles.
enum SlStatus sl_spectrum_eigenvalues(const struct SlSpectrum *s, double *buf, size_t cap);

// Index range `[start, end)` of retained cluster `k`.
//
// # Safety
// `s` must be a live spectrum; `start` and `end` writable.
enum SlStatus sl_spectrum_cluster(const struct SlSpectrum *s, size_t k, size_t *start, size_t *end);

// Parses `cap(cx,cy,cz,alpha)`, `union(...)`, `inter(...)`, `compl(...)`,
// `full` or `empty`.
//
// # Safety
// `text` must be a NUL-terminated string and `out` writable.
enum SlStatus sl_region_parse(const char *text, struct SlRegion **out);

// # Safety
// `r` must come from this library or be null.
void sl_region_free(struct SlRegion *r);

// # Safety
// `r` must be a live region and `out` writable.
enum SlStatus sl_region_contains(const struct SlRegion *r, double x, double y, double z, bool *out);

// Smallest eigenfunction mass in the region per retained cluster. Writes up
// to `cap` pairs into `ks`/`masses` and the cluster count into `count`.
//
// # Safety
// Handles must be live; `ks` and `masses` hold `cap` elements; `count` writable.
enum SlStatus sl_cluster_min_mass(const struct SlSpectrum *s,
                                  const struct SlRegion *r,
                                  size_t *ks,
                                  double *masses,
                                  size_t cap,
                                  size_t *count);

// Whether some great circle on a `grid`-point sweep misses the region.
//
// # Safety
// `r` must be a live region and `out` writable.
enum SlStatus sl_gcc_classical(const struct SlRegion *r, size_t grid, enum SlVerdict *out);

// Control condition along the flow of the great-circle average of `v` on `[−T, T]`.
//
// # Safety
// Handles must be live and `out` writable.
enum SlStatus sl_gcc_flow(const struct SlRegion *r,
                          const struct SlExpansion *v,
                          double horizon,
                          size_t grid,
                          enum SlVerdict *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPHERELAB_H */
