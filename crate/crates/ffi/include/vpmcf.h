#ifndef VPMCF_H
#define VPMCF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum VpmcfStatus {
  VPMCF_STATUS_OK = 0,
  VPMCF_STATUS_NULL_POINTER = 1,
  VPMCF_STATUS_INVALID_ARGUMENT = 2,
  VPMCF_STATUS_AXIS_CONTACT = 3,
  VPMCF_STATUS_NUMERICAL_FAILURE = 4,
  VPMCF_STATUS_INSUFFICIENT_DATA = 5,
  VPMCF_STATUS_OUT_OF_RANGE = 6,
  VPMCF_STATUS_PANIC = 7,
} VpmcfStatus;

/**
 * Nodal fields selectable through [`vpmcf_profile_field`].
 */
typedef enum VpmcfField {
  VPMCF_FIELD_RHO = 0,
  VPMCF_FIELD_D1 = 1,
  VPMCF_FIELD_D2 = 2,
  VPMCF_FIELD_V = 3,
  VPMCF_FIELD_P = 4,
  VPMCF_FIELD_Q = 5,
  VPMCF_FIELD_K = 6,
  VPMCF_FIELD_H = 7,
  VPMCF_FIELD_A2 = 8,
  VPMCF_FIELD_C3 = 9,
} VpmcfField;

typedef enum VpmcfMode {
  VPMCF_MODE_VOLUME_PRESERVING = 0,
  VPMCF_MODE_PLAIN_MCF = 1,
} VpmcfMode;

typedef enum VpmcfRunStatus {
  VPMCF_RUN_STATUS_RUNNING = 0,
  VPMCF_RUN_STATUS_REACHED_T_END = 1,
  VPMCF_RUN_STATUS_AXIS_CONTACT = 2,
  VPMCF_RUN_STATUS_CURVATURE_BLOWUP = 3,
  VPMCF_RUN_STATUS_STEP_UNDERFLOW = 4,
} VpmcfRunStatus;

typedef enum VpmcfClassification {
  VPMCF_CLASSIFICATION_TYPE_I = 0,
  VPMCF_CLASSIFICATION_INCONCLUSIVE = 1,
  VPMCF_CLASSIFICATION_TYPE_II_SUSPECT = 2,
} VpmcfClassification;

/**
 * Opaque profile handle.
 */
typedef struct VpmcfProfile VpmcfProfile;

/**
 * Opaque trajectory handle.
 */
typedef struct VpmcfTrajectory VpmcfTrajectory;

/**
 * Flow parameters. Optional thresholds are disabled (or defaulted) with NaN.
 */
typedef struct VpmcfFlowConfig {
  enum VpmcfMode mode;
  double dt_safety;
  double t_end;
  double stop_rho_min;
  double stop_a2_max;
  bool volume_projection;
  size_t output_every;
  double record_a2_growth;
  double rho_floor;
  double vol_tol;
} VpmcfFlowConfig;

typedef struct VpmcfFit {
  double t_est;
  double c_est;
  double r2;
  double window_start;
  double window_end;
  double convexity;
  size_t samples;
  enum VpmcfClassification classification;
} VpmcfFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length, 0 when none.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t vpmcf_last_error(char *buf, size_t len);

/**
 * Build a profile from `intervals + 1` radii on `[a, b]`.
 *
 * # Safety
 * `rho` must point to `len` readable doubles; `out` must be writable.
 */
enum VpmcfStatus vpmcf_profile_new(double a,
                                   double b,
                                   size_t dim,
                                   const double *rho,
                                   size_t len,
                                   struct VpmcfProfile **out);

/**
 * # Safety
 * `profile` must be null or a handle from this library, freed once.
 */
void vpmcf_profile_free(struct VpmcfProfile *profile);

/**
 * Number of nodes (`intervals + 1`); 0 for a null handle.
 *
 * # Safety
 * `profile` must be null or a live handle.
 */
size_t vpmcf_profile_len(const struct VpmcfProfile *profile);

/**
 * Time stamp of the profile.
 *
 * # Safety
 * `profile` must be a live handle and `out` writable.
 */
enum VpmcfStatus vpmcf_profile_time(const struct VpmcfProfile *profile, double *out);

/**
 * Enclosed volume.
 *
 * # Safety
 * `profile` must be a live handle and `out` writable.
 */
enum VpmcfStatus vpmcf_profile_volume(const struct VpmcfProfile *profile, double *out);

/**
 * Lateral surface area.
 *
 * # Safety
 * `profile` must be a live handle and `out` writable.
 */
enum VpmcfStatus vpmcf_profile_area(const struct VpmcfProfile *profile, double *out);

/**
 * Area-weighted average of the mean curvature.
 *
 * # Safety
 * `profile` must be a live handle and `out` writable.
 */
enum VpmcfStatus vpmcf_profile_mean_curvature_average(const struct VpmcfProfile *profile,
                                                      double *out);

/**
 * Write one nodal field into `out[0..len]`; `len` must equal the node count.
 *
 * # Safety
 * `profile` must be a live handle and `out` must hold `len` doubles.
 */
enum VpmcfStatus vpmcf_profile_field(const struct VpmcfProfile *profile,
                                     enum VpmcfField field,
                                     double *out,
                                     size_t len);

/**
 * Fill `out` with the default flow parameters.
 *
 * # Safety
 * `out` must be writable.
 */
enum VpmcfStatus vpmcf_flow_config_default(struct VpmcfFlowConfig *out);

/**
 * Integrate from `initial` until `t_end` or the first singularity.
 *
 * # Safety
 * `initial` and `config` must be live and `out` writable.
 */
enum VpmcfStatus vpmcf_run(const struct VpmcfProfile *initial,
                           const struct VpmcfFlowConfig *config,
                           struct VpmcfTrajectory **out);

/**
 * # Safety
 * `traj` must be null or a handle from this library, freed once.
 */
void vpmcf_trajectory_free(struct VpmcfTrajectory *traj);

/**
 * Number of recorded states; 0 for a null handle.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
size_t vpmcf_trajectory_len(const struct VpmcfTrajectory *traj);

/**
 * How the run ended.
 *
 * # Safety
 * `traj` must be a live handle and `out` writable.
 */
enum VpmcfStatus vpmcf_trajectory_status(const struct VpmcfTrajectory *traj,
                                         enum VpmcfRunStatus *out);

/**
 * Time, averaged mean curvature and a fresh profile handle of state `index`.
 * Any of the output pointers may be null.
 *
 * # Safety
 * `traj` must be a live handle; non-null outputs must be writable.
 */
enum VpmcfStatus vpmcf_trajectory_state(const struct VpmcfTrajectory *traj,
                                        size_t index,
                                        double *t,
                                        double *h,
                                        struct VpmcfProfile **profile);

/**
 * Blow-up rate fit of a singular trajectory.
 *
 * # Safety
 * `traj` must be a live handle and `out` writable.
 */
enum VpmcfStatus vpmcf_trajectory_fit(const struct VpmcfTrajectory *traj, struct VpmcfFit *out);

/**
 * Blow-up rate fit of a recorded `(t, max |A|^2)` series; samples at or
 * below `growth` times the first value are dropped.
 *
 * # Safety
 * `t` and `max_a2` must hold `len` doubles each; `out` must be writable.
 */
enum VpmcfStatus vpmcf_fit_series(const double *t,
                                  const double *max_a2,
                                  size_t len,
                                  double growth,
                                  struct VpmcfFit *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VPMCF_H */
