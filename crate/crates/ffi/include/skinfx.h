/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef SKINFX_H
#define SKINFX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  SKINFX_STATUS_OK = 0,
  SKINFX_STATUS_NULL_POINTER = 1,
  SKINFX_STATUS_INVALID_ARGUMENT = 2,
  SKINFX_STATUS_OUT_OF_RANGE = 3,
  SKINFX_STATUS_NUMERICAL_FAILURE = 4,
  SKINFX_STATUS_NO_EXCEPTIONAL_POINT = 5,
  SKINFX_STATUS_PANIC = 6,
} SkinfxStatus;

/**
 * Opaque resonator chain.
 */
typedef struct SkinfxChain SkinfxChain;

/**
 * Opaque spectrum of one chain.
 */
typedef struct SkinfxSpectrum SkinfxSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t skinfx_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *skinfx_version(void);

/**
 * Parses a JSON chain configuration.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
SkinfxStatus skinfx_chain_from_json(const char *json, SkinfxChain **out);

/**
 * Uniform chain of `n` resonators.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
SkinfxStatus skinfx_chain_uniform(size_t n,
                                  double length,
                                  double spacing,
                                  double gamma,
                                  double delta,
                                  double v_b,
                                  SkinfxChain **out);

/**
 * Chain of `2n+1` resonators with `-gamma` on sites `1..n` and `+gamma`
 * on the rest.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
SkinfxStatus skinfx_chain_interface(size_t n,
                                    double gamma,
                                    double length,
                                    double spacing,
                                    double delta,
                                    double v_b,
                                    SkinfxChain **out);

/**
 * Number of resonators, or 0 for a null handle.
 *
 * # Safety
 * `chain` must be null or a live handle.
 */
size_t skinfx_chain_len(const SkinfxChain *chain);

/**
 * # Safety
 * `chain` must be null or a handle not freed before.
 */
void skinfx_chain_free(SkinfxChain *chain);

/**
 * Eigenvalues, frequencies and eigenvectors of a chain.
 *
 * # Safety
 * `chain` must be a live handle and `out` a valid pointer.
 */
SkinfxStatus skinfx_spectrum_solve(const SkinfxChain *chain, SkinfxSpectrum **out);

/**
 * Number of modes, or 0 for a null handle.
 *
 * # Safety
 * `spec` must be null or a live handle.
 */
size_t skinfx_spectrum_len(const SkinfxSpectrum *spec);

/**
 * Eigenvalue `k` (sorted by real then imaginary part).
 *
 * # Safety
 * `spec` must be a live handle; `re` and `im` valid pointers.
 */
SkinfxStatus skinfx_spectrum_eigenvalue(const SkinfxSpectrum *spec,
                                        size_t k,
                                        double *re,
                                        double *im);

/**
 * Frequency `ω_k = v_b √(δ λ_k)`.
 *
 * # Safety
 * `spec` must be a live handle; `re` and `im` valid pointers.
 */
SkinfxStatus skinfx_spectrum_omega(const SkinfxSpectrum *spec, size_t k, double *re, double *im);

/**
 * `‖v_k‖∞ / ‖v_k‖₂` of mode `k`.
 *
 * # Safety
 * `spec` must be a live handle and `out` a valid pointer.
 */
SkinfxStatus skinfx_spectrum_localization(const SkinfxSpectrum *spec, size_t k, double *out);

/**
 * Copies eigenvector `k` into `re[0..len]`, `im[0..len]`; `len` must equal
 * the number of resonators.
 *
 * # Safety
 * `spec` must be a live handle; `re` and `im` must hold `len` doubles.
 */
SkinfxStatus skinfx_spectrum_eigenvector(const SkinfxSpectrum *spec,
                                         size_t k,
                                         double *re,
                                         double *im,
                                         size_t len);

/**
 * # Safety
 * `spec` must be null or a handle not freed before.
 */
void skinfx_spectrum_free(SkinfxSpectrum *spec);

/**
 * Critical gauge `γ_c(s1, s2)` of a periodic dimer.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
SkinfxStatus skinfx_critical_gamma(double s1, double s2, double *out);

/**
 * Vorticity of a periodic dimer with unit lengths.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
SkinfxStatus skinfx_vorticity(double s1, double s2, double gamma, size_t samples, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SKINFX_H */
