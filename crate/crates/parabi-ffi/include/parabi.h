#ifndef PARABI_H
#define PARABI_H

/* Generated by cbindgen from parabi-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every entry point.
typedef enum ParabiStatus {
  PARABI_STATUS_OK = 0,
  // A pointer argument was null or a scalar argument out of range.
  PARABI_STATUS_INVALID_ARGUMENT = 1,
  // g >= omega/2: the oscillator spectrum collapses.
  PARABI_STATUS_SPECTRAL_COLLAPSE = 2,
  // The requested Fock cutoff cannot reach the truncation tolerance.
  PARABI_STATUS_CUTOFF_TOO_SMALL = 3,
  // Configuration rejected (see the model parameter contracts).
  PARABI_STATUS_INVALID_PARAMETER = 4,
  // Requested estimate outside its derivation scope.
  PARABI_STATUS_UNSUPPORTED_CONFIGURATION = 5,
  // Internal numerical failure (positivity, convergence, ...).
  PARABI_STATUS_NUMERICAL_ERROR = 6,
} ParabiStatus;

// Opaque handle owning a prepared evolution (model, frame, expansion
// coefficients, kernel tables).
typedef struct ParabiEvolver ParabiEvolver;

// Two-qubit observables at one scaled time.
typedef struct ParabiObservables {
  double inversion;
  double entropy_bits;
  double coherence_bits;
  double discord2;
  double concurrence;
  double purity;
} ParabiObservables;

// Oscillator-side quantities at one scaled time.
typedef struct ParabiOscillator {
  double v_min;
  double n_mean;
  double a_mean_re;
  double a_mean_im;
  // 1 when v_min < 0.5.
  uint8_t squeezed;
} ParabiOscillator;

// Closest generalized-Bell superposition of the two-qubit state.
typedef struct ParabiBell {
  // Hilbert-Schmidt distance reached by the search.
  double d_min;
  // Spectral closed form √(Trρ² + 1 - 2λ_max).
  double d_min_closed_form;
  // Amplitudes over {Φ+, Φ-, Ψ+, Ψ-}, gauge-fixed.
  double amp_re[4];
  double amp_im[4];
  // 1 when the top eigenvalue is degenerate and the minimizer not unique.
  uint8_t degenerate;
} ParabiBell;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds an evolver for the model
// H = ω a†a + Σ_j (Δ_j/2 σ_j^z + λ_j σ_j^x (a†+a)) + g(a†²+a²)
// and the initial state (cosθ|1,1⟩ + e^{iφ} sinθ|-1,-1⟩) ⊗ |α⟩.
//
// `n_max` = 0 selects the cutoff automatically; `eps_trunc` <= 0 uses the
// default truncation tolerance. On success `*out` owns the handle.
//
// # Safety
// `out` must be a valid pointer; the handle must be released with
// [`parabi_evolver_free`].
enum ParabiStatus parabi_evolver_new(double omega,
                                     double delta1,
                                     double delta2,
                                     double lambda1,
                                     double lambda2,
                                     double g,
                                     unsigned int n_max,
                                     double theta,
                                     double phi,
                                     double alpha_re,
                                     double alpha_im,
                                     double eps_trunc,
                                     struct ParabiEvolver **out);

// Releases a handle created by [`parabi_evolver_new`]. Null is ignored.
//
// # Safety
// `handle` must come from [`parabi_evolver_new`] and not be used afterwards.
void parabi_evolver_free(struct ParabiEvolver *handle);

// Number of Fock levels retained by the expansion.
//
// # Safety
// `handle` must be a live evolver handle.
unsigned int parabi_evolver_n_levels(const struct ParabiEvolver *handle);

// Truncation residual 1 - Σ|C|² of the expansion.
//
// # Safety
// `handle` must be live and `out` valid.
enum ParabiStatus parabi_evolver_residual(const struct ParabiEvolver *handle, double *out);

// Two-qubit reduced density matrix at scaled time t, written row-major into
// `re[16]`/`im[16]` in the basis {|1,1⟩, |-1,1⟩, |1,-1⟩, |-1,-1⟩}.
//
// # Safety
// `handle` must be live; `re` and `im` must each point at 16 doubles.
enum ParabiStatus parabi_two_qubit_rdm(const struct ParabiEvolver *handle,
                                       double t,
                                       double *re,
                                       double *im);

// The standard two-qubit observables at scaled time t.
//
// # Safety
// `handle` must be live and `out` valid.
enum ParabiStatus parabi_observables_at(const struct ParabiEvolver *handle,
                                        double t,
                                        struct ParabiObservables *out);

// Oscillator moments and principal quadrature variance at scaled time t.
//
// # Safety
// `handle` must be live and `out` valid.
enum ParabiStatus parabi_oscillator_at(const struct ParabiEvolver *handle,
                                       double t,
                                       struct ParabiOscillator *out);

// Reconstructs the closest Bell superposition at scaled time t. `seed`
// feeds the search restarts.
//
// # Safety
// `handle` must be live and `out` valid.
enum ParabiStatus parabi_bell_at(const struct ParabiEvolver *handle,
                                 double t,
                                 uint64_t seed,
                                 struct ParabiBell *out);

// k-th revival-time estimate 2πk/((2η)²Δ̃) for the symmetric configuration
// (equal splittings `delta`, equal couplings `lambda`).
//
// # Safety
// `out` must be valid.
enum ParabiStatus parabi_revival_time(double omega,
                                      double delta,
                                      double lambda,
                                      double g,
                                      unsigned int k,
                                      double *out);

// Static description of a status code.
const char *parabi_status_message(enum ParabiStatus status);

// Library version as a static C string.
const char *parabi_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PARABI_H */
