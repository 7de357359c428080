#ifndef MBQC_FIDELITY_H
#define MBQC_FIDELITY_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum MfStatus {
  MF_OK = 0,
  MF_NULL_POINTER = 1,
  MF_VALIDATION = 2,
  MF_CAP_EXCEEDED = 3,
  MF_IO = 4,
  MF_INTERNAL = 5,
  MF_PANIC = 6,
} MfStatus;

/**
 * Draws stabilizers from the Ω distribution of a state. Draw `k` uses
 * stream `k` of the seed, so a sampler reproduces its sequence exactly.
 */
typedef struct MfSampler MfSampler;

/**
 * A resource state with flow.
 */
typedef struct MfState MfState;

typedef struct MfSpectralSummary {
  double max;
  double beta;
  double tau;
  double nu;
  uint64_t max_multiplicity;
} MfSpectralSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *mf_last_error(void);

/**
 * Library version as a static string.
 */
const char *mf_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void mf_string_free(char *s);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum MfStatus mf_state_cluster_1d(size_t n, struct MfState **out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum MfStatus mf_state_cluster_2d(size_t rows, size_t cols, struct MfState **out);

/**
 * Parses a resource-state JSON document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` valid for writes.
 */
enum MfStatus mf_state_from_json(const char *json, struct MfState **out);

/**
 * # Safety
 * `state` must be a live handle and `out` valid for writes.
 */
enum MfStatus mf_state_to_json(const struct MfState *state, char **out);

/**
 * # Safety
 * `state` must be a live handle and `out` valid for writes.
 */
enum MfStatus mf_state_num_qubits(const struct MfState *state, size_t *out);

/**
 * # Safety
 * `state` must be null or a handle not yet freed.
 */
void mf_state_free(struct MfState *state);

/**
 * Ω as a JSON Pauli sum with exact coefficients.
 *
 * # Safety
 * `state` must be a live handle and `out` valid for writes.
 */
enum MfStatus mf_omega_json(const struct MfState *state, size_t enum_cap, char **out);

/**
 * # Safety
 * `state` must be a live handle and `out` valid for writes.
 */
enum MfStatus mf_spectral_summary(const struct MfState *state,
                                  size_t spectral_cap,
                                  struct MfSpectralSummary *out);

/**
 * Number of single-shot measurements for precision `epsilon` with
 * confidence `1 - delta`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum MfStatus mf_sample_count(double epsilon, double delta, uint64_t *out);

/**
 * # Safety
 * `state` must be a live handle and `out` valid for writes. The sampler does
 * not borrow the state, which may be freed afterwards.
 */
enum MfStatus mf_sampler_new(const struct MfState *state, uint64_t seed, struct MfSampler **out);

/**
 * Draws the next signed Pauli word, e.g. `-YXYZ`, and its probability as
 * `2^log2_prob`. `log2_prob` may be null.
 *
 * # Safety
 * `sampler` must be a live handle, `word` valid for writes and `log2_prob`
 * null or valid for writes.
 */
enum MfStatus mf_sampler_next(struct MfSampler *sampler, char **word, int32_t *log2_prob);

/**
 * # Safety
 * `sampler` must be null or a handle not yet freed.
 */
void mf_sampler_free(struct MfSampler *sampler);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MBQC_FIDELITY_H */
