#ifndef DYNRMAT_H
#define DYNRMAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a call. `DYNRMAT_STATUS_OK` is zero; library errors map one to one.
 */
typedef enum {
  DYNRMAT_STATUS_OK = 0,
  DYNRMAT_STATUS_NULL_ARGUMENT,
  DYNRMAT_STATUS_INVALID_UTF8,
  DYNRMAT_STATUS_USAGE,
  DYNRMAT_STATUS_DIVISION_BY_ZERO,
  DYNRMAT_STATUS_EXPANSION_TOO_LARGE,
  DYNRMAT_STATUS_POINT_DIMENSION,
  DYNRMAT_STATUS_UNKNOWN_NAME,
  DYNRMAT_STATUS_INVALID_ARGUMENT,
  DYNRMAT_STATUS_DEGENERATE_EVERYWHERE,
  DYNRMAT_STATUS_COMPLEMENT_TOO_LARGE,
  DYNRMAT_STATUS_NONDEGENERACY_UNDEFINED,
  DYNRMAT_STATUS_NOT_IN_BASE_SUBALGEBRA,
  DYNRMAT_STATUS_INTERPOLATION_INCONSISTENT,
  DYNRMAT_STATUS_NOT_UNITAL,
  DYNRMAT_STATUS_SLOT_OUT_OF_RANGE,
  DYNRMAT_STATUS_SLOT_NOT_FREE,
  DYNRMAT_STATUS_ARITY_MISMATCH,
  DYNRMAT_STATUS_DEGREE_BUDGET_EXCEEDED,
  DYNRMAT_STATUS_INFEASIBLE,
  DYNRMAT_STATUS_SYNTAX,
  DYNRMAT_STATUS_FORMAT,
  DYNRMAT_STATUS_PANIC,
} DynrmatStatus;

/**
 * How residual coefficients are tested for zero.
 */
typedef enum {
  DYNRMAT_ZERO_TEST_EXACT = 0,
  DYNRMAT_ZERO_TEST_SAMPLED,
  /**
   * Exact, falling back to sampling past the term budget.
   */
  DYNRMAT_ZERO_TEST_AUTO,
} DynrmatZeroTest;

/**
 * A Lie algebra with its reductive decomposition.
 */
typedef struct DynrmatAlgebra DynrmatAlgebra;

/**
 * A classical dynamical r-matrix over an algebra.
 */
typedef struct DynrmatRMatrix DynrmatRMatrix;

/**
 * A two-leg twist truncated at a fixed ℏ-order, with its tensor context.
 */
typedef struct DynrmatTwist DynrmatTwist;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the next failing call.
 */
const char *dynrmat_last_error(void);

/**
 * Library version as a static string.
 */
const char *dynrmat_version(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed. Null is ignored.
 */
void dynrmat_string_free(char *s);

/**
 * Loads `builtin:NAME` (e.g. `builtin:heisenberg(1,1)`) or an algebra JSON file.
 *
 * # Safety
 * `source` must be a valid C string and `out` writable.
 */
DynrmatStatus dynrmat_algebra_load(const char *source, DynrmatAlgebra **out);

/**
 * Dimension of the algebra and rank of its base (number of λ coordinates).
 *
 * # Safety
 * `alg` must be a live handle; `dim` and `rank` writable.
 */
DynrmatStatus dynrmat_algebra_shape(const DynrmatAlgebra *alg, size_t *dim, size_t *rank);

/**
 * # Safety
 * `alg` must come from [`dynrmat_algebra_load`] and not have been freed. Null is ignored.
 */
void dynrmat_algebra_free(DynrmatAlgebra *alg);

/**
 * Builds the r-matrix of a fat reductive decomposition.
 *
 * # Safety
 * `alg` must be a live handle and `out` writable.
 */
DynrmatStatus dynrmat_rmatrix_construct(const DynrmatAlgebra *alg, DynrmatRMatrix **out);

/**
 * Reads an r-matrix from JSON text (`{"terms": [{"i", "j", "coeff"}]}`).
 *
 * # Safety
 * `alg` must be a live handle, `json` a valid C string and `out` writable.
 */
DynrmatStatus dynrmat_rmatrix_from_json(const DynrmatAlgebra *alg,
                                        const char *json,
                                        DynrmatRMatrix **out);

/**
 * Writes `passed = 1` when the CDYBE residual and every equivariance residual vanish.
 *
 * # Safety
 * `r` must be a live handle and `passed` writable.
 */
DynrmatStatus dynrmat_rmatrix_check(const DynrmatRMatrix *r,
                                    DynrmatZeroTest mode,
                                    uint64_t seed,
                                    bool *passed);

/**
 * The r-matrix as JSON in the same format [`dynrmat_rmatrix_from_json`] reads.
 *
 * # Safety
 * `r` must be a live handle and `out` writable; free the string with [`dynrmat_string_free`].
 */
DynrmatStatus dynrmat_rmatrix_to_json(const DynrmatRMatrix *r, char **out);

/**
 * # Safety
 * `r` must come from this library and not have been freed. Null is ignored.
 */
void dynrmat_rmatrix_free(DynrmatRMatrix *r);

/**
 * Reads a two-leg twist from JSON text, truncated at `order`. The file's own
 * `algebra` field is ignored in favour of `alg`.
 *
 * # Safety
 * `alg` must be a live handle, `json` a valid C string and `out` writable.
 */
DynrmatStatus dynrmat_twist_from_json(const DynrmatAlgebra *alg,
                                      const char *json,
                                      size_t order,
                                      DynrmatTwist **out);

/**
 * Truncation order actually used (the smaller of the file's and the requested one).
 *
 * # Safety
 * `twist` must be a live handle and `order` writable.
 */
DynrmatStatus dynrmat_twist_order(const DynrmatTwist *twist, size_t *order);

/**
 * Twisted cocycle and counit conditions.
 *
 * # Safety
 * `twist` must be a live handle and `passed` writable.
 */
DynrmatStatus dynrmat_twist_check_cocycle(const DynrmatTwist *twist,
                                          DynrmatZeroTest mode,
                                          uint64_t seed,
                                          bool *passed);

/**
 * QDYBE for `R = F21^{-1} ★ F12`.
 *
 * # Safety
 * `twist` must be a live handle and `passed` writable.
 */
DynrmatStatus dynrmat_twist_check_qdybe(const DynrmatTwist *twist,
                                        DynrmatZeroTest mode,
                                        uint64_t seed,
                                        bool *passed);

/**
 * `R = F21^{-1} ★ F12` as twist-format JSON (without an `algebra` field).
 *
 * # Safety
 * `twist` must be a live handle and `out` writable; free the string with [`dynrmat_string_free`].
 */
DynrmatStatus dynrmat_twist_derive_r(const DynrmatTwist *twist, char **out);

/**
 * # Safety
 * `twist` must come from this library and not have been freed. Null is ignored.
 */
void dynrmat_twist_free(DynrmatTwist *twist);

/**
 * Runs a command-line invocation (`argv[0]` is the program name) and returns
 * the JSON report and the exit code the binary would use. Argument errors give
 * `DYNRMAT_STATUS_USAGE` with the usage text as the error message.
 *
 * # Safety
 * `argv` must point to `argc` valid C strings; `exit_code` and `report` must be writable.
 */
DynrmatStatus dynrmat_run(size_t argc, const char *const *argv, int32_t *exit_code, char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DYNRMAT_H */
