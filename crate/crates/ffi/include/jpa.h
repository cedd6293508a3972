#ifndef JPA_H
#define JPA_H

/* Generated with cbindgen:0.27.0 */

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum JpaStatus {
  JPA_STATUS_OK = 0,
  JPA_STATUS_NULL_POINTER = 1,
  JPA_STATUS_DOMAIN = 2,
  JPA_STATUS_BISTABLE = 3,
  JPA_STATUS_NUMERICAL = 4,
  JPA_STATUS_INFEASIBLE = 5,
  JPA_STATUS_PANIC = 6,
} JpaStatus;

/**
 * Opaque device handle.
 */
typedef struct JpaDevice JpaDevice;

/**
 * Critical point of a device.
 */
typedef struct JpaCritical {
  /**
   * Critical detuning, rad/s.
   */
  double delta_c;
  /**
   * Critical input amplitude, sqrt(photons/s).
   */
  double b_c;
  /**
   * Intracavity photon number at the critical point.
   */
  double n_c;
  /**
   * Critical pump frequency, Hz.
   */
  double f_c;
  /**
   * Critical pump power, W.
   */
  double p_c;
} JpaCritical;

typedef struct JpaFit {
  double n_add;
  double lambda;
  double chain_gain_db;
  double sigma_n_add;
  double sigma_lambda;
  double sigma_chain_gain_db;
  double residual_rms;
  double condition_number;
  /**
   * Non-zero when the fit is poorly determined.
   */
  int32_t ill_conditioned;
  /**
   * Non-zero when λ or N_add sits on a bound.
   */
  int32_t at_bound;
} JpaFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *jpa_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *jpa_version(void);

/**
 * Creates a device from angular frequencies (rad/s). Free with
 * `jpa_device_free`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum JpaStatus jpa_device_new(double omega0, double gamma, double kerr, struct JpaDevice **out);

/**
 * Creates the typical device (γ = 2π·54.5 MHz, K/γ = −8.3e-4, Q = 65).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum JpaStatus jpa_device_typical(struct JpaDevice **out);

/**
 * Releases a device. Null is ignored.
 *
 * # Safety
 * `dev` must come from a `jpa_device_*` constructor and not be used again.
 */
void jpa_device_free(struct JpaDevice *dev);

/**
 * # Safety
 * Pointers must be valid; `dev` must be a live handle.
 */
enum JpaStatus jpa_critical_params(const struct JpaDevice *dev, struct JpaCritical *out);

/**
 * Steady-state output phasor for input `(in_re, in_im)` at detuning
 * `delta` (rad/s). `photons` receives the intracavity photon number and
 * `bistable` is set non-zero when the low branch of a bistable solution
 * was selected.
 *
 * # Safety
 * Pointers must be valid; `dev` must be a live handle.
 */
enum JpaStatus jpa_steady_output(const struct JpaDevice *dev,
                                 double delta,
                                 double in_re,
                                 double in_im,
                                 double *out_re,
                                 double *out_im,
                                 double *photons,
                                 int32_t *bistable);

/**
 * Half a photon over the bandwidth γ/π, as a probe amplitude.
 *
 * # Safety
 * Pointers must be valid; `dev` must be a live handle.
 */
enum JpaStatus jpa_half_photon_probe(const struct JpaDevice *dev, double *out);

/**
 * Direct gain (dB) at pump frequency `f_ratio`·f_c and power `p_db` re P_c.
 *
 * # Safety
 * Pointers must be valid; `dev` must be a live handle.
 */
enum JpaStatus jpa_direct_gain(const struct JpaDevice *dev,
                               double f_ratio,
                               double p_db,
                               double probe_amp,
                               size_t n_theta,
                               double *gain_db);

/**
 * Deamplification ratio σ²_out/σ²_in (dB) and the matching direct gain.
 *
 * # Safety
 * Pointers must be valid; `dev` must be a live handle.
 */
enum JpaStatus jpa_deamp_ratio(const struct JpaDevice *dev,
                               double f_ratio,
                               double p_db,
                               double probe_amp,
                               size_t n_theta,
                               double *ratio_db,
                               double *gain_db);

/**
 * Pump power (dB re P_c) of maximum gain at `f_ratio`, with that gain.
 *
 * # Safety
 * Pointers must be valid; `dev` must be a live handle.
 */
enum JpaStatus jpa_lmg_point(const struct JpaDevice *dev,
                             double f_ratio,
                             double *p_db,
                             double *gain_db);

/**
 * Minimum of S(θ) (dB) for the JPA squeezer at (`f_ratio`, `p_db`), loss
 * `loss_db` and an ideal AMP of gain `amp_gain_db`.
 *
 * # Safety
 * Pointers must be valid; `dev` must be a live handle.
 */
enum JpaStatus jpa_squeezing_min(const struct JpaDevice *dev,
                                 double f_ratio,
                                 double p_db,
                                 double loss_db,
                                 double amp_gain_db,
                                 size_t n_samples,
                                 size_t n_theta,
                                 uint64_t seed,
                                 double *min_s_db,
                                 double *stderr_db);

/**
 * Thermal noise 1/2 + 1/(exp(ħω/k_BT) − 1) in quanta.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum JpaStatus jpa_thermal_occupancy(double temperature, double omega, double *out);

/**
 * Fits chain gain, λ and N_add to `n` noise samples given as parallel
 * arrays (K, K, quanta).
 *
 * # Safety
 * The three arrays must hold `n` readable values each.
 */
enum JpaStatus jpa_fit_added_noise(const double *t_vts,
                                   const double *t_fridge,
                                   const double *psd_out,
                                   size_t n,
                                   double omega,
                                   struct JpaFit *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JPA_H */
