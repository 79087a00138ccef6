#ifndef QIDETECT_H
#define QIDETECT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call. Codes 1 to 4 match the command-line
// exit codes.
typedef enum QidStatus {
  QID_STATUS_OK = 0,
  QID_STATUS_IO = 1,
  QID_STATUS_CONFIG = 2,
  QID_STATUS_DATA = 3,
  QID_STATUS_PHYSICS = 4,
  QID_STATUS_NULL_POINTER = 5,
  QID_STATUS_INVALID_ARGUMENT = 6,
  QID_STATUS_PANIC = 7,
} QidStatus;

typedef enum QidModel {
  QID_MODEL_CI = 0,
  QID_MODEL_QI = 1,
} QidModel;

typedef enum QidPhase {
  QID_PHASE_PLUS = 0,
  QID_PHASE_MINUS = 1,
} QidPhase;

typedef enum QidLabel {
  // Target absent.
  QID_LABEL_H0 = 0,
  // Target present.
  QID_LABEL_H1 = 1,
} QidLabel;

// Opaque, validated scenario parameters.
typedef struct QidParams QidParams;

// Opaque ROC curve, points ordered by descending threshold.
typedef struct QidRoc QidRoc;

// Plain copy of the scenario parameters.
typedef struct QidParamValues {
  // Mean signal photons per mode.
  double n_s;
  // Mean thermal noise photons per mode.
  double n_b;
  // Target transmissivity.
  double kappa;
  // Idler storage transmissivity.
  double kappa_i;
  // Imperfection factor on the QI SNR.
  double zeta;
  // Modes per decision.
  double m;
  // Phase-conjugator gain.
  double g_a;
  // Receiver transmissivity.
  double kappa_r;
} QidParamValues;

// Decision statistic moments under each hypothesis.
typedef struct QidMoments {
  double mu0;
  double sigma0;
  double mu1;
  double sigma1;
} QidMoments;

typedef struct QidRocPoint {
  double beta;
  double p_f;
  double p_d;
} QidRocPoint;

typedef struct QidPhotonStats {
  double mean;
  double variance;
} QidPhotonStats;

// One Gaussian-state circuit against closed-form comparison, per mode.
typedef struct QidOracleRow {
  double mean_exact;
  double mean_closed;
  // NaN when the gain is one and the comparison is undefined.
  double variance_exact;
  double variance_closed;
  // 1 when both moments are within tolerance.
  int32_t passed;
} QidOracleRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *qid_version(void);

// Message for the last failed call on this thread, empty after a success.
// Valid until the next call into the library on the same thread.
const char *qid_last_error_message(void);

// Validates `values` and returns a new handle in `*out`.
//
// # Safety
// `values` must be readable and `out` writable.
enum QidStatus qid_params_new(const struct QidParamValues *values, struct QidParams **out);

// The reference scenario.
//
// # Safety
// `out` must be writable.
enum QidStatus qid_params_fig4(struct QidParams **out);

// # Safety
// `params` must be a live handle and `out` writable.
enum QidStatus qid_params_values(const struct QidParams *params, struct QidParamValues *out);

// Releases a handle; null is ignored.
//
// # Safety
// `params` must be null or a handle not yet freed.
void qid_params_free(struct QidParams *params);

// Decision-level SNR of `model`.
//
// # Safety
// `params` must be a live handle and `out` writable.
enum QidStatus qid_snr(const struct QidParams *params, uint32_t model_id, double *out);

// QI over CI SNR advantage in dB. Fails with `Physics` when the CI SNR
// vanishes.
//
// # Safety
// `params` must be a live handle and `out` writable.
enum QidStatus qid_advantage_db(const struct QidParams *params, double *out);

// Decision moments of `model`; QI uses the `+` phase.
//
// # Safety
// `params` must be a live handle and `out` writable.
enum QidStatus qid_moments(const struct QidParams *params,
                           uint32_t model_id,
                           struct QidMoments *out);

// Imperfection factor reproducing a measured advantage.
//
// # Safety
// `out` must be writable.
enum QidStatus qid_fit_zeta(double advantage_db, double kappa_i, double *out);

// Standard normal tail probability `P(Z > x)`.
double qid_q_function(double x);

// Inverse tail probability for `p` in `(0, 1)`.
//
// # Safety
// `out` must be writable.
enum QidStatus qid_q_inverse(double p, double *out);

// Detection probability at false-alarm rate `p_f`.
//
// # Safety
// `moments` must be readable and `out` writable.
enum QidStatus qid_pd_at_pf(const struct QidMoments *moments, double p_f, double *out);

// Analytic ROC on `n_thresholds` evenly spaced thresholds.
//
// # Safety
// `moments` must be readable and `out` writable.
enum QidStatus qid_roc_analytic(const struct QidMoments *moments,
                                size_t n_thresholds,
                                struct QidRoc **out);

// Empirical ROC of two decision sets at the given thresholds.
//
// # Safety
// Each array must be readable for its length and `out` writable.
enum QidStatus qid_roc_empirical(const double *absent,
                                 size_t n_absent,
                                 const double *present,
                                 size_t n_present,
                                 const double *thresholds,
                                 size_t n_thresholds,
                                 struct QidRoc **out);

// Number of points; 0 for a null handle.
//
// # Safety
// `roc` must be null or a live handle.
size_t qid_roc_len(const struct QidRoc *roc);

// # Safety
// `roc` must be a live handle and `out` writable.
enum QidStatus qid_roc_point(const struct QidRoc *roc, size_t index, struct QidRocPoint *out);

// Releases a curve; null is ignored.
//
// # Safety
// `roc` must be null or a handle not yet freed.
void qid_roc_free(struct QidRoc *roc);

// Fills `buffer` with `len` simulated decisions. The output depends only on
// the parameters, model, label, seed and `len`.
//
// # Safety
// `params` must be a live handle and `buffer` writable for `len` elements.
enum QidStatus qid_simulate_decisions(const struct QidParams *params,
                                      uint32_t model_id,
                                      uint32_t label_id,
                                      uint64_t seed,
                                      double *buffer,
                                      size_t len);

// Per-mode photon-number difference at the phase-conjugate receiver,
// from the Gaussian-state circuit.
//
// # Safety
// `params` must be a live handle and `out` writable.
enum QidStatus qid_qi_output_stats(const struct QidParams *params,
                                   uint32_t phase_id,
                                   struct QidPhotonStats *out);

// Compares the QI circuit with its closed-form moments.
//
// # Safety
// `params` must be a live handle and `out` writable.
enum QidStatus qid_oracle_qi(const struct QidParams *params,
                             uint32_t phase_id,
                             struct QidOracleRow *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QIDETECT_H */
