#ifndef CSQPT_H
#define CSQPT_H

#include <stddef.h>
#include <stdint.h>

typedef enum CsqptStatus {
  CSQPT_STATUS_OK = 0,
  CSQPT_STATUS_NULL_POINTER = 1,
  CSQPT_STATUS_INVALID_ARGUMENT = 2,
  CSQPT_STATUS_OUT_OF_RANGE = 3,
  CSQPT_STATUS_MISMATCH = 4,
  CSQPT_STATUS_UNDERDETERMINED = 5,
  CSQPT_STATUS_RANK_DEFICIENT = 6,
  CSQPT_STATUS_IO = 7,
  CSQPT_STATUS_FORMAT = 8,
  CSQPT_STATUS_PANIC = 9,
} CsqptStatus;

typedef enum CsqptEstimateMode {
  CSQPT_ESTIMATE_MODE_PHASE_INVARIANT = 0,
  CSQPT_ESTIMATE_MODE_GENERAL = 1,
} CsqptEstimateMode;

// Probe dataset handle.
typedef struct CsqptDataset CsqptDataset;

// Density matrix handle.
typedef struct CsqptState CsqptState;

// Process tensor handle.
typedef struct CsqptTensor CsqptTensor;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. Valid until
// the next failing call on the same thread.
const char *csqpt_last_error(void);

// Closed-form tensor of a named process. `params` may be NULL or empty;
// `modes == 0` picks the process's own mode count.
//
// # Safety
// String arguments must be NUL-terminated; `out` must be writable.
enum CsqptStatus csqpt_tensor_analytic(const char *process,
                                       const char *params,
                                       size_t n_max,
                                       size_t modes,
                                       struct CsqptTensor **out);

// # Safety
// `t` must come from this library and not be used afterwards. NULL is a no-op.
void csqpt_tensor_free(struct CsqptTensor *t);

// # Safety
// `path` must be NUL-terminated; `out` must be writable.
enum CsqptStatus csqpt_tensor_read(const char *path, struct CsqptTensor **out);

// # Safety
// `t` must be a live handle; `path` must be NUL-terminated.
enum CsqptStatus csqpt_tensor_write(const struct CsqptTensor *t, const char *path);

// Per-mode cutoff N, or 0 for NULL.
//
// # Safety
// `t` must be a live handle or NULL.
size_t csqpt_tensor_n_max(const struct CsqptTensor *t);

// Number of modes, or 0 for NULL.
//
// # Safety
// `t` must be a live handle or NULL.
size_t csqpt_tensor_modes(const struct CsqptTensor *t);

// Hilbert-space dimension D, or 0 for NULL.
//
// # Safety
// `t` must be a live handle or NULL.
size_t csqpt_tensor_dim(const struct CsqptTensor *t);

// Entry `E[m][n][j][k]` over flat indices `< D`.
//
// # Safety
// `t` must be a live handle; `re` and `im` must be writable.
enum CsqptStatus csqpt_tensor_get(const struct CsqptTensor *t,
                                  size_t m,
                                  size_t n,
                                  size_t j,
                                  size_t k,
                                  double *re,
                                  double *im);

// Largest elementwise modulus of `a - b`.
//
// # Safety
// Both handles must be live; `out` must be writable.
enum CsqptStatus csqpt_tensor_max_abs_diff(const struct CsqptTensor *a,
                                           const struct CsqptTensor *b,
                                           double *out);

// Smallest eigenvalue of the Choi matrix.
//
// # Safety
// `t` must be a live handle; `out` must be writable.
enum CsqptStatus csqpt_tensor_choi_min_eigenvalue(const struct CsqptTensor *t, double *out);

// Output of the tensor on `rho`.
//
// # Safety
// Handles must be live; `out` must be writable.
enum CsqptStatus csqpt_tensor_apply(const struct CsqptTensor *t,
                                    const struct CsqptState *rho,
                                    struct CsqptState **out);

// Truncated, unrenormalized coherent state. `re` and `im` hold one value
// per mode.
//
// # Safety
// `re` and `im` must point to `modes` doubles; `out` must be writable.
enum CsqptStatus csqpt_state_coherent(const double *re,
                                      const double *im,
                                      size_t modes,
                                      size_t n_max,
                                      struct CsqptState **out);

// Fock state with `photons[i]` photons in mode `i`.
//
// # Safety
// `photons` must point to `modes` values; `out` must be writable.
enum CsqptStatus csqpt_state_fock(const size_t *photons,
                                  size_t modes,
                                  size_t n_max,
                                  struct CsqptState **out);

// # Safety
// `rho` must come from this library and not be used afterwards. NULL is a no-op.
void csqpt_state_free(struct CsqptState *rho);

// # Safety
// `path` must be NUL-terminated; `out` must be writable.
enum CsqptStatus csqpt_state_read(const char *path, struct CsqptState **out);

// # Safety
// `rho` must be a live handle; `path` must be NUL-terminated.
enum CsqptStatus csqpt_state_write(const struct CsqptState *rho, const char *path);

// Matrix dimension, or 0 for NULL.
//
// # Safety
// `rho` must be a live handle or NULL.
size_t csqpt_state_dim(const struct CsqptState *rho);

// # Safety
// `rho` must be a live handle; `out` must be writable.
enum CsqptStatus csqpt_state_trace(const struct CsqptState *rho, double *out);

// Element `<j|rho|k>`.
//
// # Safety
// `rho` must be a live handle; `re` and `im` must be writable.
enum CsqptStatus csqpt_state_get(const struct CsqptState *rho,
                                 size_t j,
                                 size_t k,
                                 double *re,
                                 double *im);

// Synthetic probe data. Amplitudes are `count * modes` values, probe-major.
//
// # Safety
// Strings must be NUL-terminated (`params` may be NULL); `re` and `im` must
// point to `count * modes` doubles; `out` must be writable.
enum CsqptStatus csqpt_dataset_synthesize(const char *process,
                                          const char *params,
                                          size_t n_max,
                                          size_t modes,
                                          const double *re,
                                          const double *im,
                                          size_t count,
                                          double noise_sigma,
                                          uint64_t seed,
                                          struct CsqptDataset **out);

// # Safety
// `path` must be NUL-terminated; `out` must be writable.
enum CsqptStatus csqpt_dataset_read(const char *path, struct CsqptDataset **out);

// # Safety
// `ds` must be a live handle; `path` must be NUL-terminated.
enum CsqptStatus csqpt_dataset_write(const struct CsqptDataset *ds, const char *path);

// Number of probe records, or 0 for NULL.
//
// # Safety
// `ds` must be a live handle or NULL.
size_t csqpt_dataset_len(const struct CsqptDataset *ds);

// # Safety
// `ds` must come from this library and not be used afterwards. NULL is a no-op.
void csqpt_dataset_free(struct CsqptDataset *ds);

// Estimates a tensor from a dataset. `condition_number` may be NULL.
// Two-mode datasets require `General`.
//
// # Safety
// `ds` must be a live handle; `out` must be writable.
enum CsqptStatus csqpt_estimate(const struct CsqptDataset *ds,
                                enum CsqptEstimateMode mode,
                                size_t threads,
                                struct CsqptTensor **out,
                                double *condition_number);

// `epsilon = 2 sqrt(gamma) + gamma / (1 - gamma)`.
//
// # Safety
// `out` must be writable.
enum CsqptStatus csqpt_epsilon_from_gamma(double gamma, double *out);

// # Safety
// `out` must be writable.
enum CsqptStatus csqpt_gamma_from_epsilon(double epsilon, double *out);

// Smallest cutoff N with `energy / ((N + 3/2) omega) <= gamma`.
//
// # Safety
// `out` must be writable.
enum CsqptStatus csqpt_required_cutoff(double energy, double omega, double gamma, uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CSQPT_H */
