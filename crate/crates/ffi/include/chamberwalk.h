/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef CHAMBERWALK_H
#define CHAMBERWALK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CwStatus {
  CW_STATUS_OK = 0,
  CW_STATUS_NULL_POINTER = 1,
  CW_STATUS_INVALID_ARGUMENT = 2,
  CW_STATUS_DIMENSION_MISMATCH = 3,
  CW_STATUS_NUMERICAL = 4,
  CW_STATUS_SERIALIZATION = 5,
  CW_STATUS_PANIC = 6,
} CwStatus;

/**
 * Opaque root system handle.
 */
typedef struct CwRootSystem CwRootSystem;

typedef struct CwSphericalValue {
  double re;
  double im;
  double est_abs_error;
  bool regularized;
} CwSphericalValue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until
 * the next failing call on the same thread.
 */
const char *cw_last_error_message(void);

/**
 * Build a root system; `family` is one of 'A', 'B', 'C', 'D'.
 *
 * # Safety
 * `out` must be a valid pointer; free the handle with `cw_root_system_free`.
 */
enum CwStatus cw_root_system_new(char family, size_t rank, struct CwRootSystem **out);

/**
 * # Safety
 * `rs` must come from `cw_root_system_new` and not be used afterwards.
 */
void cw_root_system_free(struct CwRootSystem *rs);

/**
 * Ambient dimension, or 0 for a NULL handle.
 *
 * # Safety
 * `rs` must be NULL or a live handle.
 */
size_t cw_root_system_dim(const struct CwRootSystem *rs);

/**
 * # Safety
 * `out` must hold `len` doubles.
 */
enum CwStatus cw_root_system_rho(const struct CwRootSystem *rs, double *out, size_t len);

/**
 * # Safety
 * `x` must hold `len` doubles and `out` must be valid.
 */
enum CwStatus cw_semicharacter(const struct CwRootSystem *rs,
                               const double *x,
                               size_t len,
                               double *out);

/**
 * Euclidean spherical function. `lambda_im` may be NULL for real `lambda`.
 *
 * # Safety
 * All non-NULL vectors must hold `len` doubles.
 */
enum CwStatus cw_spherical_psi(const struct CwRootSystem *rs,
                               const double *lambda_re,
                               const double *lambda_im,
                               const double *x,
                               size_t len,
                               struct CwSphericalValue *out);

/**
 * Group spherical function. `lambda_im` may be NULL for real `lambda`.
 *
 * # Safety
 * All non-NULL vectors must hold `len` doubles.
 */
enum CwStatus cw_spherical_phi(const struct CwRootSystem *rs,
                               const double *lambda_re,
                               const double *lambda_im,
                               const double *x,
                               size_t len,
                               struct CwSphericalValue *out);

/**
 * Modified moment function at a chamber point.
 *
 * # Safety
 * `x` and `out` must hold `len` doubles.
 */
enum CwStatus cw_m1(const struct CwRootSystem *rs, const double *x, size_t len, double *out);

/**
 * The dominant representative of the Weyl orbit of `v`.
 *
 * # Safety
 * `v` and `out` must hold `len` doubles.
 */
enum CwStatus cw_chamber_project(const struct CwRootSystem *rs,
                                 const double *v,
                                 size_t len,
                                 double *out);

/**
 * Run a group walk from a JSON configuration and return the JSON report.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string; release `*out_json` with
 * `cw_string_free`.
 */
enum CwStatus cw_walk_json(const char *config_json, char **out_json);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void cw_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHAMBERWALK_H */
