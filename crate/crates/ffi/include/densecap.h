#ifndef DENSECAP_H
#define DENSECAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum DcStatus {
  DC_STATUS_OK = 0,
  DC_STATUS_NULL_POINTER = 1,
  DC_STATUS_INVALID_UTF8 = 2,
  DC_STATUS_PARSE = 3,
  DC_STATUS_DIMENSION = 4,
  DC_STATUS_INVALID_INPUT = 5,
  DC_STATUS_NUMERICAL = 6,
  DC_STATUS_PANIC = 7,
} DcStatus;

typedef enum DcUnits {
  DC_UNITS_BITS = 0,
  DC_UNITS_NATS = 1,
} DcUnits;

// Orthonormal measurement basis of B.
typedef struct DcBasis DcBasis;

// Representation of the encoding group on A, with its decomposition when known.
typedef struct DcRep DcRep;

// Density matrix on A⊗B.
typedef struct DcState DcState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until the
// next failing call on the same thread.
const char *dc_last_error(void);

// Library version as a static string.
const char *dc_version(void);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void dc_string_free(char *s);

// Parses a state file (`{dims, matrix}` or `{dims, amplitudes}`).
//
// # Safety
// `json` must be a valid NUL-terminated string and `out` writable.
enum DcStatus dc_state_from_json(const char *json, struct DcState **out);

// Pure state on A⊗B from `d_a·d_b` amplitudes given as separate real and
// imaginary arrays, A-index major. The vector is normalized.
//
// # Safety
// `re` and `im` must point to `d_a * d_b` readable doubles and `out` be writable.
enum DcStatus dc_state_from_amplitudes(const double *re,
                                       const double *im,
                                       size_t d_a,
                                       size_t d_b,
                                       struct DcState **out);

// # Safety
// `state` must be null or a handle from this library, not yet freed.
void dc_state_free(struct DcState *state);

// Writes the subsystem dimensions of `state`.
//
// # Safety
// `state` must be a live handle; `d_a` and `d_b` writable.
enum DcStatus dc_state_dims(const struct DcState *state, size_t *d_a, size_t *d_b);

// Built-in representation by name: `Zd`, `Zd-diag`, `WHd` or `S3`.
//
// # Safety
// `name` must be a valid NUL-terminated string and `out` writable.
enum DcStatus dc_rep_from_name(const char *name, struct DcRep **out);

// Parses a representation file (tagged by `kind`).
//
// # Safety
// `json` must be a valid NUL-terminated string and `out` writable.
enum DcStatus dc_rep_from_json(const char *json, struct DcRep **out);

// # Safety
// `rep` must be null or a handle from this library, not yet freed.
void dc_rep_free(struct DcRep *rep);

// Dimension of the space the representation acts on.
//
// # Safety
// `rep` must be null or a live handle.
size_t dc_rep_dim(const struct DcRep *rep);

// # Safety
// `out` must be writable.
enum DcStatus dc_basis_computational(size_t d, struct DcBasis **out);

// # Safety
// `out` must be writable.
enum DcStatus dc_basis_fourier(size_t d, struct DcBasis **out);

// Basis from the columns of a d×d unitary given row-major as real and imaginary parts.
//
// # Safety
// `re` and `im` must point to `d * d` readable doubles and `out` be writable.
enum DcStatus dc_basis_from_unitary(const double *re,
                                    const double *im,
                                    size_t d,
                                    struct DcBasis **out);

// # Safety
// `basis` must be null or a handle from this library, not yet freed.
void dc_basis_free(struct DcBasis *basis);

// Capacity with the receiver's full quantum memory.
//
// # Safety
// Handles must be live; `out` writable.
enum DcStatus dc_capacity(const struct DcState *state,
                          const struct DcRep *rep,
                          enum DcUnits u,
                          double *out);

// Capacity when the receiver measures B in `basis` before decoding.
//
// # Safety
// Handles must be live; `out` writable.
enum DcStatus dc_capacity_measured(const struct DcState *state,
                                   const struct DcRep *rep,
                                   const struct DcBasis *basis,
                                   enum DcUnits u,
                                   double *out);

// Frobenius residual of reconstructing the state from its measured version.
//
// # Safety
// Handles must be live; `out` writable.
enum DcStatus dc_reconstruction_residual(const struct DcState *state,
                                         const struct DcRep *rep,
                                         const struct DcBasis *basis,
                                         double *out);

// Full classification report as JSON. `basis` may be null. Free the result
// with [`dc_string_free`].
//
// # Safety
// Non-null handles must be live; `out` writable.
enum DcStatus dc_classify_json(const struct DcState *state,
                               const struct DcRep *rep,
                               const struct DcBasis *basis,
                               uint64_t seed,
                               char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DENSECAP_H */
