#ifndef RETFIELDS_H
#define RETFIELDS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RfFormulation {
  RF_FORMULATION_FEYNMAN = 0,
  RF_FORMULATION_EXPLICIT = 1,
  RF_FORMULATION_POTENTIALS = 2,
} RfFormulation;

typedef enum RfStatus {
  RF_STATUS_OK = 0,
  RF_STATUS_NULL_POINTER = 1,
  RF_STATUS_INVALID_UTF8 = 2,
  RF_STATUS_CONFIG = 3,
  RF_STATUS_INVALID_TRAJECTORY = 4,
  RF_STATUS_INVALID_ARGUMENT = 5,
  RF_STATUS_NOT_ADMISSIBLE = 6,
  RF_STATUS_OUTSIDE_G = 7,
  RF_STATUS_ITERATION_LIMIT = 8,
  RF_STATUS_CHART_DOMAIN = 9,
  RF_STATUS_IO = 10,
  RF_STATUS_PANIC = 11,
} RfStatus;

/**
 * Opaque trajectory handle.
 */
typedef struct RfTrajectory RfTrajectory;

typedef struct RfVec3 {
  double x;
  double y;
  double z;
} RfVec3;

typedef struct RfAdmissibility {
  double stop_time;
  double speed_bound;
  double accel_bound;
  bool admissible;
} RfAdmissibility;

typedef struct RfRetarded {
  double tau;
  double delay;
  uint64_t iterations;
  double certified_error;
  double speed_bound;
} RfRetarded;

/**
 * Fundamental fields at an event.
 */
typedef struct RfFundamental {
  double tau;
  double delay;
  struct RfVec3 r12;
  struct RfVec3 e;
  struct RfVec3 v;
  struct RfVec3 a;
  double u;
  double z;
} RfFundamental;

typedef struct RfEmFields {
  struct RfVec3 e_field;
  struct RfVec3 b_field;
  struct RfVec3 a_potential;
  double phi;
} RfEmFields;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread; empty after success.
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *rf_last_error_message(void);

/**
 * Parses a JSON trajectory config into a new handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RfStatus rf_trajectory_from_json(const char *json, struct RfTrajectory **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `traj` must come from this library and not be used afterwards.
 */
void rf_trajectory_free(struct RfTrajectory *traj);

/**
 * Serialises a trajectory back to its JSON config; free the result with [`rf_string_free`].
 *
 * # Safety
 * `traj` must be a valid handle and `out` a valid pointer.
 */
enum RfStatus rf_trajectory_to_json(const struct RfTrajectory *traj, char **out);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void rf_string_free(char *s);

/**
 * Position, velocity and acceleration at time `t`. Any out-pointer may be null.
 *
 * # Safety
 * `traj` must be a valid handle; non-null out-pointers must be valid.
 */
enum RfStatus rf_trajectory_eval(const struct RfTrajectory *traj,
                                 double t,
                                 struct RfVec3 *position,
                                 struct RfVec3 *velocity,
                                 struct RfVec3 *acceleration);

/**
 * Speed and acceleration bounds on `(−∞, stop_time]`.
 *
 * # Safety
 * `traj` must be a valid handle and `out` a valid pointer.
 */
enum RfStatus rf_trajectory_check_admissible(const struct RfTrajectory *traj,
                                             double stop_time,
                                             struct RfAdmissibility *out);

/**
 * Proper time elapsed over `[t0, t1]`.
 *
 * # Safety
 * `traj` must be a valid handle and `out` a valid pointer.
 */
enum RfStatus rf_trajectory_proper_time(const struct RfTrajectory *traj,
                                        double t0,
                                        double t1,
                                        double *out);

/**
 * Boosts by `speed` along `axis` and resamples over boosted times `[start, end]`
 * with `knots` knots. Writes a new handle and the interpolation-error estimate.
 *
 * # Safety
 * `traj` must be a valid handle; `out` must be valid; `interpolation_error` may be null.
 */
enum RfStatus rf_trajectory_boost(const struct RfTrajectory *traj,
                                  double speed,
                                  struct RfVec3 axis,
                                  double start,
                                  double end,
                                  size_t knots,
                                  struct RfTrajectory **out,
                                  double *interpolation_error);

/**
 * Retarded time of the event `(r1, t)`.
 *
 * # Safety
 * `traj` must be a valid handle and `out` a valid pointer.
 */
enum RfStatus rf_retarded_time(const struct RfTrajectory *traj,
                               struct RfVec3 r1,
                               double t,
                               double tol,
                               struct RfRetarded *out);

/**
 * Fundamental fields at `(r1, t)`.
 *
 * # Safety
 * `traj` must be a valid handle and `out` a valid pointer.
 */
enum RfStatus rf_fundamental_fields(const struct RfTrajectory *traj,
                                    struct RfVec3 r1,
                                    double t,
                                    double tol,
                                    struct RfFundamental *out);

/**
 * `E`, `B`, `A` and `φ` at `(r1, t)`.
 *
 * # Safety
 * `traj` must be a valid handle and `out` a valid pointer.
 */
enum RfStatus rf_em_fields(const struct RfTrajectory *traj,
                           struct RfVec3 r1,
                           double t,
                           double tol,
                           enum RfFormulation method,
                           struct RfEmFields *out);

/**
 * Fields at `n` events given as `events[4k..4k+4] = (x, y, z, t)`, evaluated in
 * parallel. `statuses` (may be null) receives one status per event; failed
 * entries of `out` are zeroed. Returns the first failing status, or `OK`.
 *
 * # Safety
 * `events` must hold `4n` doubles, `out` `n` records and `statuses`, if non-null, `n` entries.
 */
enum RfStatus rf_em_fields_batch(const struct RfTrajectory *traj,
                                 const double *events,
                                 size_t n,
                                 double tol,
                                 enum RfFormulation method,
                                 struct RfEmFields *out,
                                 enum RfStatus *statuses);

/**
 * Library version as a static NUL-terminated string.
 */
const char *rf_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RETFIELDS_H */
