/* C interface of the tomokit quantum tomography library. */

#ifndef TOMOKIT_H
#define TOMOKIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible call.
typedef enum TomoStatus {
  // Success.
  TOMO_STATUS_OK = 0,
  // A required pointer argument was null.
  TOMO_STATUS_NULL_POINTER = 1,
  // An argument was out of range or malformed.
  TOMO_STATUS_INVALID_ARGUMENT = 2,
  // Operand dimensions do not match.
  TOMO_STATUS_DIMENSION_MISMATCH = 3,
  // The projector family does not span the operator space.
  TOMO_STATUS_RANK_DEFICIENT = 4,
  // A numeric guard tripped (overflow, branch point, misalignment).
  TOMO_STATUS_NUMERIC = 5,
} TomoStatus;

// Opaque dual-kernel handle produced by Gram-Schmidt orthonormalization.
typedef struct TomoKernel TomoKernel;

// Opaque dense complex matrix handle.
typedef struct TomoMatrix TomoMatrix;

// Opaque projector-family handle, built vector by vector.
typedef struct TomoSet TomoSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static C string.
const char *tomo_version(void);

// Message describing the most recent error on this thread. The pointer is
// valid until the next failing call on the same thread.
const char *tomo_last_error(void);

// Creates a dim x dim matrix from row-major interleaved complex entries
// (2 * dim * dim doubles).
//
// # Safety
// `entries` must point to 2 * dim * dim readable doubles and `out` to a
// writable handle slot.
enum TomoStatus tomo_matrix_new(size_t dim, const double *entries, struct TomoMatrix **out);

// Seeded random density matrix (Hermitian, positive, unit trace).
//
// # Safety
// `out` must point to a writable handle slot.
enum TomoStatus tomo_matrix_random_density(size_t dim, uint64_t seed, struct TomoMatrix **out);

// Releases a matrix handle; null is ignored.
//
// # Safety
// `m` must be a handle from this library, not yet freed.
void tomo_matrix_free(struct TomoMatrix *m);

// Matrix dimension, or 0 for a null handle.
//
// # Safety
// `m` must be a live handle or null.
size_t tomo_matrix_dim(const struct TomoMatrix *m);

// Copies the matrix into a caller buffer of 2 * dim * dim doubles,
// row-major interleaved.
//
// # Safety
// `buffer` must have room for 2 * dim * dim doubles.
enum TomoStatus tomo_matrix_copy(const struct TomoMatrix *m, double *buffer);

// Trace scalar product Tr(A† B).
//
// # Safety
// All pointers must be live handles / writable doubles.
enum TomoStatus tomo_hs_inner(const struct TomoMatrix *a,
                              const struct TomoMatrix *b,
                              double *out_re,
                              double *out_im);

// New empty projector family on a dim-dimensional space.
//
// # Safety
// `out` must point to a writable handle slot.
enum TomoStatus tomo_set_new(size_t dim, struct TomoSet **out);

// Releases a set handle; null is ignored.
//
// # Safety
// `s` must be a handle from this library, not yet freed.
void tomo_set_free(struct TomoSet *s);

// Appends the rank-one projector of a state vector given as interleaved
// complex amplitudes (2 * dim doubles); the vector is normalized.
//
// # Safety
// `vector` must point to 2 * dim readable doubles.
enum TomoStatus tomo_set_push_vector(struct TomoSet *s, const double *vector);

// Number of projectors currently in the family.
//
// # Safety
// `s` must be a live handle or null.
size_t tomo_set_len(const struct TomoSet *s);

// Minimality diagnosis: writes rank, condition number, and 1/0 minimality.
//
// # Safety
// Output pointers must be writable.
enum TomoStatus tomo_set_minimality(const struct TomoSet *s,
                                    int32_t *out_minimal,
                                    size_t *out_rank,
                                    double *out_condition);

// Gram-Schmidt dual kernel of a minimal family.
//
// # Safety
// `out` must point to a writable handle slot.
enum TomoStatus tomo_kernel_new(const struct TomoSet *s, struct TomoKernel **out);

// Releases a kernel handle; null is ignored.
//
// # Safety
// `k` must be a handle from this library, not yet freed.
void tomo_kernel_free(struct TomoKernel *k);

// Frobenius residual of the identity decomposition built from the kernel.
//
// # Safety
// `out` must be writable.
enum TomoStatus tomo_kernel_identity_residual(const struct TomoKernel *k, double *out);

// Tomogram of a state against the family: writes one probability per
// projector into `values`.
//
// # Safety
// `values` must have room for tomo_set_len(s) doubles.
enum TomoStatus tomo_tomogram(const struct TomoMatrix *rho,
                              const struct TomoSet *s,
                              double *values);

// Linear inversion of a tomogram through the dual kernel.
//
// # Safety
// `values` must hold `len` doubles; `out` must be a writable handle slot.
enum TomoStatus tomo_reconstruct(const struct TomoKernel *k,
                                 const double *values,
                                 size_t len,
                                 struct TomoMatrix **out);

// The explicit U(2) reconstruction kernel at a sphere direction, written as
// 8 doubles (2x2 row-major interleaved).
//
// # Safety
// `buffer` must have room for 8 doubles.
enum TomoStatus tomo_spin_half_kernel(double theta, double phi, double *buffer);

// Wigner 3j symbol with all angular momenta passed as doubled integers.
//
// # Safety
// `out` must be writable.
enum TomoStatus tomo_wigner_3j(int32_t two_j1,
                               int32_t two_j2,
                               int32_t two_j3,
                               int32_t two_m1,
                               int32_t two_m2,
                               int32_t two_m3,
                               double *out);

// Two-Gaussian marginals demonstration: writes the position and momentum
// marginal gaps and the overlap fidelity.
//
// # Safety
// Output pointers must be writable.
enum TomoStatus tomo_pauli_demo(double alpha_re,
                                double alpha_im,
                                double beta,
                                double *out_gap_q,
                                double *out_gap_p,
                                double *out_fidelity);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TOMOKIT_H */
