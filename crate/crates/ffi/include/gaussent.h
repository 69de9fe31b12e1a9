/* C interface of the gaussent Gaussian-state toolkit. */

#ifndef GAUSSENT_H
#define GAUSSENT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum GaussentStatus {
  GAUSSENT_STATUS_OK = 0,
  GAUSSENT_STATUS_NULL_POINTER = 1,
  GAUSSENT_STATUS_INVALID_ARGUMENT = 2,
  GAUSSENT_STATUS_NON_FINITE = 3,
  GAUSSENT_STATUS_DIMENSION_MISMATCH = 4,
  GAUSSENT_STATUS_UNPHYSICAL = 5,
  GAUSSENT_STATUS_NOT_POSITIVE_DEFINITE = 6,
  GAUSSENT_STATUS_DEGENERATE_NUMERICS = 7,
  GAUSSENT_STATUS_INDEX_OUT_OF_RANGE = 8,
  GAUSSENT_STATUS_CONSTRAINT_VIOLATION = 9,
  GAUSSENT_STATUS_NEGATIVE_RADICAND = 10,
  GAUSSENT_STATUS_UNPHYSICAL_PURITIES = 11,
  GAUSSENT_STATUS_NOT_SYMMETRIC = 12,
  GAUSSENT_STATUS_NOT_BISYMMETRIC = 13,
  GAUSSENT_STATUS_NOT_PURE = 14,
  GAUSSENT_STATUS_OPTIMIZER_FAILURE = 15,
  GAUSSENT_STATUS_DOMAIN_ERROR = 16,
  GAUSSENT_STATUS_INTERNAL_PANIC = 17,
} GaussentStatus;

/**
 * Entanglement class at fixed purities.
 */
typedef enum GaussentEntanglementClass {
  GAUSSENT_ENTANGLEMENT_CLASS_SEPARABLE = 0,
  GAUSSENT_ENTANGLEMENT_CLASS_COEXISTENCE = 1,
  GAUSSENT_ENTANGLEMENT_CLASS_ENTANGLED = 2,
} GaussentEntanglementClass;

/**
 * Opaque covariance-matrix handle.
 */
typedef struct GaussentCm GaussentCm;

/**
 * Flat two-mode analysis record.
 */
typedef struct GaussentTwoModeAnalysis {
  double mu1;
  double mu2;
  double mu;
  double delta;
  double a;
  double b;
  double c_plus;
  double c_minus;
  double nu_tilde_minus;
  double nu_tilde_plus;
  double log_negativity;
  enum GaussentEntanglementClass classification;
} GaussentTwoModeAnalysis;

/**
 * Optimal-fidelity record of a teleportation network.
 */
typedef struct GaussentFidelityResult {
  double fidelity;
  double e_t;
  double optimal_bias;
} GaussentFidelityResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Write the most recent error message (UTF-8, NUL-terminated, truncated to
 * `len`) into `buf`. Returns the full message length in bytes.
 */
uintptr_t gaussent_last_error_message(char *buf, uintptr_t len);

/**
 * Parse a covariance matrix from its JSON representation
 * {"n_modes": N, "ordering": "xpxp", "matrix": [[...]]}.
 *
 * # Safety
 * `json` must be a NUL-terminated UTF-8 string; `out` must be valid.
 */
enum GaussentStatus gaussent_cm_from_json(const char *json, struct GaussentCm **out);

/**
 * Serialize a covariance matrix to JSON. The returned string must be
 * released with [`gaussent_string_free`].
 *
 * # Safety
 * `cm` must be a live handle; `out` must be valid.
 */
enum GaussentStatus gaussent_cm_to_json(const struct GaussentCm *cm, char **out);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must originate from this library and not have been freed before.
 */
void gaussent_string_free(char *s);

/**
 * Release a covariance-matrix handle.
 *
 * # Safety
 * `cm` must originate from this library and not have been freed before.
 */
void gaussent_cm_free(struct GaussentCm *cm);

/**
 * Vacuum state on `n_modes` modes.
 *
 * # Safety
 * `out` must be valid.
 */
enum GaussentStatus gaussent_cm_vacuum(uintptr_t n_modes, struct GaussentCm **out);

/**
 * Two-mode squeezed vacuum at squeezing `r`.
 *
 * # Safety
 * `out` must be valid.
 */
enum GaussentStatus gaussent_cm_tmsv(double r, struct GaussentCm **out);

/**
 * GHZ-type fully symmetric state.
 *
 * # Safety
 * `out` must be valid.
 */
enum GaussentStatus gaussent_cm_ghz(uintptr_t n_modes,
                                    double squeezing,
                                    double thermal_noise,
                                    struct GaussentCm **out);

/**
 * Number of modes of a handle (0 for null).
 *
 * # Safety
 * `cm` must be a live handle or null.
 */
uintptr_t gaussent_cm_n_modes(const struct GaussentCm *cm);

/**
 * Symmetry/physicality report of a covariance matrix.
 *
 * # Safety
 * All pointers must be valid.
 */
enum GaussentStatus gaussent_cm_validate(const struct GaussentCm *cm,
                                         bool *out_symmetric,
                                         bool *out_physical,
                                         double *out_nu_min);

/**
 * Purity μ = 1/√Det σ.
 *
 * # Safety
 * All pointers must be valid.
 */
enum GaussentStatus gaussent_cm_purity(const struct GaussentCm *cm, double *out);

/**
 * Symplectic spectrum, ascending; `values` must hold `n_modes` doubles.
 *
 * # Safety
 * All pointers must be valid and `values` large enough.
 */
enum GaussentStatus gaussent_cm_symplectic_spectrum(const struct GaussentCm *cm, double *values);

/**
 * Log-negativity across the first-k | rest bipartition.
 *
 * # Safety
 * All pointers must be valid.
 */
enum GaussentStatus gaussent_cm_log_negativity_split(const struct GaussentCm *cm,
                                                     uintptr_t k,
                                                     double *out);

/**
 * Reduced state on the `keep_len` modes listed in `keep` (0-based).
 *
 * # Safety
 * All pointers must be valid; `keep` must hold `keep_len` indices.
 */
enum GaussentStatus gaussent_cm_partial_trace(const struct GaussentCm *cm,
                                              const uintptr_t *keep,
                                              uintptr_t keep_len,
                                              struct GaussentCm **out);

/**
 * Full two-mode analysis: invariants, standard form, PPT pair,
 * log-negativity and classification.
 *
 * # Safety
 * All pointers must be valid.
 */
enum GaussentStatus gaussent_two_mode_analysis(const struct GaussentCm *cm,
                                               struct GaussentTwoModeAnalysis *out);

/**
 * Entanglement class at given purities.
 *
 * # Safety
 * `out` must be valid.
 */
enum GaussentStatus gaussent_classify(double mu1,
                                      double mu2,
                                      double mu,
                                      enum GaussentEntanglementClass *out);

/**
 * Gaussian contangle of `focus` versus the rest (seeded optimizer for
 * mixed inputs). `out_analytic` reports whether the closed-form pure-state
 * branch was taken.
 *
 * # Safety
 * All pointers must be valid.
 */
enum GaussentStatus gaussent_contangle_one_vs_rest(const struct GaussentCm *cm,
                                                   uintptr_t focus,
                                                   uint64_t seed,
                                                   double *out_value,
                                                   bool *out_analytic);

/**
 * Minimum residual contangle of a three-mode state.
 *
 * # Safety
 * All pointers must be valid.
 */
enum GaussentStatus gaussent_residual_contangle(const struct GaussentCm *cm,
                                                uint64_t seed,
                                                double *out_minimum);

/**
 * Optimal teleportation fidelity over the squeezing bias at fixed average
 * squeezing `r_bar` for `parties` users.
 *
 * # Safety
 * `out` must be valid.
 */
enum GaussentStatus gaussent_optimal_fidelity(uintptr_t parties,
                                              double r_bar,
                                              double noise,
                                              struct GaussentFidelityResult *out);

/**
 * Localizable entanglement of formation as a function of E_T.
 *
 * # Safety
 * `out` must be valid.
 */
enum GaussentStatus gaussent_localizable_eof_from_et(double e_t, double *out);

/**
 * Residual contangle of the pure three-mode resource as a function of E_T.
 *
 * # Safety
 * `out` must be valid.
 */
enum GaussentStatus gaussent_tripartite_contangle_from_et(double e_t, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GAUSSENT_H */
