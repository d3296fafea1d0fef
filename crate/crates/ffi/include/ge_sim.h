#ifndef GE_SIM_H
#define GE_SIM_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GeStatus {
  GE_STATUS_OK = 0,
  GE_STATUS_NULL_POINTER = 1,
  GE_STATUS_INVALID_ARGUMENT = 2,
  GE_STATUS_RESONANCE_ORDERING = 3,
  GE_STATUS_SCALE_SEPARATION = 4,
  GE_STATUS_QUADRATURE = 5,
  GE_STATUS_TRUNCATION = 6,
  GE_STATUS_STEP_SIZE = 7,
  GE_STATUS_INTEGRATOR_DRIFT = 8,
  GE_STATUS_GRID_EXTENT = 9,
  GE_STATUS_CAVITY_MODE = 10,
  GE_STATUS_PANIC = 11,
} GeStatus;

typedef enum GePexMethod {
  GE_PEX_METHOD_NUMERIC = 0,
  GE_PEX_METHOD_GOLDEN_RULE = 1,
  GE_PEX_METHOD_SADDLE_SHORT = 2,
  GE_PEX_METHOD_SADDLE_LONG = 3,
} GePexMethod;

typedef enum GeNegativityMethod {
  GE_NEGATIVITY_METHOD_PARTIAL_TRANSPOSE = 0,
  GE_NEGATIVITY_METHOD_CLOSED_FORM = 1,
  GE_NEGATIVITY_METHOD_SCHMIDT = 2,
} GeNegativityMethod;

typedef enum GeAbsorberMode {
  GE_ABSORBER_MODE_AUTO = 0,
  GE_ABSORBER_MODE_ON = 1,
  GE_ABSORBER_MODE_OFF = 2,
} GeAbsorberMode;

/**
 * Opaque handle to a validated model.
 */
typedef struct GeModel GeModel;

/**
 * Opaque handle to a grid wavefunction and the model that drives it.
 */
typedef struct GeOracle GeOracle;

/**
 * Multi-run feasibility inputs in SI units. Zero `omega0` or `k_res` selects
 * the defaults |omega_b| and the run-length tuning.
 */
typedef struct GeFeasibilityInput {
  double mass_ratio;
  double density;
  double alpha_abs;
  double omega_b;
  double omega0;
  double tau1;
  double t_tot;
  double k_res;
} GeFeasibilityInput;

typedef struct GeFeasibilityReport {
  double per_run;
  double n_runs;
  double total;
  double total_linear;
  double k_res;
  double t_sat;
  double g;
  bool short_run;
} GeFeasibilityReport;

/**
 * Grid parameters; obtain defaults from [`ge_grid_spec_default`].
 */
typedef struct GeGridSpec {
  double x_max;
  size_t nx;
  double y_max;
  size_t ny;
  double dt;
  enum GeAbsorberMode absorber_mode;
  double absorber_width_fraction;
  double absorber_strength;
  /**
   * Propagate only branch 0, only branch 1, or (when false) both.
   */
  bool single_branch;
  size_t branch;
} GeGridSpec;

typedef struct GeMeasurement {
  double tau;
  double norm;
  double p_ex;
  double visibility;
  double visibility_detected;
  double negativity;
} GeMeasurement;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null after a success.
 * The pointer stays valid until the next library call on the same thread.
 */
const char *ge_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ge_version(void);

/**
 * Builds a model in internal units (|omega_b| = 1).
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GeStatus ge_model_new(double g,
                           double omega0,
                           double omega1,
                           double alpha_re,
                           double alpha_im,
                           struct GeModel **out);

/**
 * Builds a model from a JSON object of SI inputs
 * (`m`, `M`, `d`, `L`, `Omega0`, `Omega1`, `alpha`, optional `G`, `hbar`).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` valid for writes.
 */
enum GeStatus ge_model_from_si_json(const char *json, struct GeModel **out);

/**
 * # Safety
 * `model` must come from a `ge_model_*` constructor and not be used afterwards.
 */
void ge_model_free(struct GeModel *model);

/**
 * Resonant wavenumber and saturation time of `model`.
 *
 * # Safety
 * `model` must be a live handle; outputs must be valid for writes.
 */
enum GeStatus ge_model_resonance(const struct GeModel *model, double *k_res, double *t_sat);

/**
 * Excitation probability at dimensionless time `t`.
 *
 * # Safety
 * `model` must be a live handle; `out` valid for writes.
 */
enum GeStatus ge_pex(const struct GeModel *model, double t, enum GePexMethod method, double *out);

/**
 * Excitation probability under mean-field gravity.
 *
 * # Safety
 * `model` must be a live handle; `out` valid for writes.
 */
enum GeStatus ge_sn_pex(const struct GeModel *model, double t, double *out);

/**
 * Qubit interference visibility.
 *
 * # Safety
 * `model` must be a live handle; `out` valid for writes.
 */
enum GeStatus ge_visibility(const struct GeModel *model,
                            double t,
                            bool detected,
                            bool include_offres,
                            double *out);

/**
 * Particle versus (qubit, oscillator) negativity.
 *
 * # Safety
 * `model` must be a live handle; `out` valid for writes.
 */
enum GeStatus ge_negativity(const struct GeModel *model,
                            double t,
                            enum GeNegativityMethod method,
                            double *out);

/**
 * # Safety
 * `input` must be readable and `out` valid for writes.
 */
enum GeStatus ge_feasibility(const struct GeFeasibilityInput *input,
                             struct GeFeasibilityReport *out);

/**
 * Default oracle grid.
 */
struct GeGridSpec ge_grid_spec_default(void);

/**
 * Prepares the initial grid state `|b> (|alpha>_0 + |alpha>_1) / sqrt 2`.
 * A null `spec` selects the default grid.
 *
 * # Safety
 * `model` must be a live handle, `spec` null or readable, `out` valid for writes.
 */
enum GeStatus ge_oracle_new(const struct GeModel *model,
                            const struct GeGridSpec *spec,
                            struct GeOracle **out);

/**
 * # Safety
 * `oracle` must come from [`ge_oracle_new`] and not be used afterwards.
 */
void ge_oracle_free(struct GeOracle *oracle);

/**
 * Propagates the state forward to dimensionless time `tau_end`.
 *
 * # Safety
 * `oracle` must be a live handle not shared with another thread.
 */
enum GeStatus ge_oracle_advance(struct GeOracle *oracle, double tau_end);

/**
 * # Safety
 * `oracle` must be a live handle; `out` valid for writes.
 */
enum GeStatus ge_oracle_measure(const struct GeOracle *oracle, struct GeMeasurement *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GE_SIM_H */
