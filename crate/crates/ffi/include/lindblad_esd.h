#ifndef LINDBLAD_ESD_H
#define LINDBLAD_ESD_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible function.
 */
typedef enum LeStatus {
  LE_STATUS_OK = 0,
  LE_STATUS_NULL_POINTER = 1,
  LE_STATUS_INVALID_ARGUMENT = 2,
  LE_STATUS_INVALID_PARAMS = 3,
  LE_STATUS_DIMENSION_MISMATCH = 4,
  LE_STATUS_INVALID_STATE = 5,
  LE_STATUS_NUMERICAL_FAILURE = 6,
  LE_STATUS_PANIC = 7,
} LeStatus;

typedef enum LeFamily {
  LE_FAMILY_THERMAL = 0,
  LE_FAMILY_SQUEEZED = 1,
  /**
   * QND with `g(t) = g_scale * t`.
   */
  LE_FAMILY_QND_LINEAR = 2,
  /**
   * QND with `g(t) = g_scale * t^2`.
   */
  LE_FAMILY_QND_QUADRATIC = 3,
} LeFamily;

/**
 * Opaque density matrix with subsystem dimensions.
 */
typedef struct LeDensity LeDensity;

/**
 * Opaque qubit or qudit superoperator.
 */
typedef struct LeSuperop LeSuperop;

/**
 * Bath parameters; `n_mean` is derived from `n_th` and `r`.
 */
typedef struct LeBathParams {
  double gamma;
  double n_th;
  double r;
  double phi;
  double omega;
} LeBathParams;

/**
 * Outcome of `le_esd_time`. `never` is nonzero when no transition was found
 * up to the horizon, in which case the time fields are NaN.
 */
typedef struct LeEsdResult {
  int32_t never;
  double transition_time;
  double t_low;
  double t_high;
  size_t iterations;
  int32_t single_crossing;
} LeEsdResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *le_version(void);

/**
 * Message of the last failed call on this thread (empty after a success).
 * The pointer stays valid until the next call into the library on this thread.
 */
const char *le_last_error_message(void);

/**
 * Closed-form thermal propagator `V(t)` at decay rate `gamma` and occupation `n_mean`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum LeStatus le_superop_thermal(double gamma, double n_mean, double t, struct LeSuperop **out);

/**
 * Closed-form squeezed-bath propagator.
 *
 * # Safety
 * `params` must point to a valid `LeBathParams`; `out` as in `le_superop_thermal`.
 */
enum LeStatus le_superop_squeezed(const struct LeBathParams *params,
                                  double t,
                                  struct LeSuperop **out);

/**
 * QND dephasing channel with the exponent `g_t = g(t)` already evaluated.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum LeStatus le_superop_qnd(double omega, double g_t, double t, struct LeSuperop **out);

/**
 * Identity channel on dimension `dim`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum LeStatus le_superop_identity(size_t dim, struct LeSuperop **out);

/**
 * # Safety
 * `v` must be null or a handle returned by this library that was not freed yet.
 */
void le_superop_free(struct LeSuperop *v);

/**
 * Hilbert-space dimension `d` of the channel (its matrix is `d^2 x d^2`); 0 for a null handle.
 *
 * # Safety
 * `v` must be null or a live handle.
 */
size_t le_superop_dim(const struct LeSuperop *v);

/**
 * Copies the `d^2 x d^2` superoperator matrix into `re`/`im` (row-major, `len >= d^4`).
 *
 * # Safety
 * `v` must be a live handle; `re` and `im` must each hold `len` doubles.
 */
enum LeStatus le_superop_matrix(const struct LeSuperop *v, double *re, double *im, size_t len);

/**
 * Whether the qubit channel is entanglement breaking (its Choi state is PPT within `tol`).
 *
 * # Safety
 * `v` must be a live handle; `out` must be writable.
 */
enum LeStatus le_superop_is_entanglement_breaking(const struct LeSuperop *v,
                                                  double tol,
                                                  int32_t *out);

/**
 * Builds a validated density matrix from row-major `re`/`im` arrays of
 * length `D^2`, `D` being the product of the `n_dims` entries of `dims`.
 *
 * # Safety
 * `dims` must hold `n_dims` entries; `re` and `im` must each hold `D^2` doubles.
 */
enum LeStatus le_density_new(const size_t *dims,
                             size_t n_dims,
                             const double *re,
                             const double *im,
                             struct LeDensity **out);

/**
 * # Safety
 * `rho` must be null or a handle returned by this library that was not freed yet.
 */
void le_density_free(struct LeDensity *rho);

/**
 * Total dimension of the state; 0 for a null handle.
 *
 * # Safety
 * `rho` must be null or a live handle.
 */
size_t le_density_dim(const struct LeDensity *rho);

/**
 * Copies the density matrix into `re`/`im` (row-major, `len >= D^2`).
 *
 * # Safety
 * `rho` must be a live handle; `re` and `im` must each hold `len` doubles.
 */
enum LeStatus le_density_matrix(const struct LeDensity *rho, double *re, double *im, size_t len);

/**
 * Unit-trace Choi state of the channel.
 *
 * # Safety
 * `v` must be a live handle; `out` must be writable.
 */
enum LeStatus le_choi(const struct LeSuperop *v, struct LeDensity **out);

/**
 * Applies the channel to tensor factor `which` of `rho`.
 *
 * # Safety
 * `v` and `rho` must be live handles; `out` must be writable.
 */
enum LeStatus le_apply_to_subsystem(const struct LeSuperop *v,
                                    const struct LeDensity *rho,
                                    size_t which,
                                    struct LeDensity **out);

/**
 * Two-qubit concurrence.
 *
 * # Safety
 * `rho` must be a live handle; `out` must be writable.
 */
enum LeStatus le_concurrence(const struct LeDensity *rho, double *out);

/**
 * Negativity across tensor factor `cut`.
 *
 * # Safety
 * `rho` must be a live handle; `out` must be writable.
 */
enum LeStatus le_negativity(const struct LeDensity *rho, size_t cut, double *out);

/**
 * Choi separability transition time of a channel family. `params` is
 * ignored for the QND families, which use `omega` from it only when non-null.
 *
 * # Safety
 * `params` must be null (QND only) or point to a valid `LeBathParams`; `out` must be writable.
 */
enum LeStatus le_esd_time(enum LeFamily family,
                          const struct LeBathParams *params,
                          double g_scale,
                          double horizon,
                          double precision,
                          struct LeEsdResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LINDBLAD_ESD_H */
