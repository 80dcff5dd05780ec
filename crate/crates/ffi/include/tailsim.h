#ifndef TAILSIM_H
#define TAILSIM_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define TAILSIM_SAT_THROTTLE_1 (1 << 0)

#define TAILSIM_SAT_THROTTLE_2 (1 << 1)

#define TAILSIM_SAT_AMPLITUDE_1 (1 << 2)

#define TAILSIM_SAT_AMPLITUDE_2 (1 << 3)

#define TAILSIM_SAT_SERVO_1 (1 << 4)

#define TAILSIM_SAT_SERVO_2 (1 << 5)

typedef enum TailsimStatus {
  TAILSIM_STATUS_OK = 0,
  TAILSIM_STATUS_NULL_POINTER = 1,
  TAILSIM_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Configuration text did not parse or failed validation.
   */
  TAILSIM_STATUS_CONFIG = 3,
  TAILSIM_STATUS_INFEASIBLE = 4,
  /**
   * Non-finite state while stepping.
   */
  TAILSIM_STATUS_SIMULATION_FAULT = 5,
  TAILSIM_STATUS_IO = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  TAILSIM_STATUS_INTERNAL = 7,
} TailsimStatus;

typedef enum TailsimVariant {
  TAILSIM_VARIANT_SEA = 0,
  TAILSIM_VARIANT_CEA = 1,
} TailsimVariant;

/**
 * Opaque configuration handle.
 */
typedef struct TailsimConfig TailsimConfig;

/**
 * Opaque scenario result handle.
 */
typedef struct TailsimReport TailsimReport;

/**
 * Collective thrust (N) and body moment (N·m).
 */
typedef struct TailsimWrench {
  double thrust;
  double tau[3];
} TailsimWrench;

/**
 * Per-motor nominal throttle, amplitude and phase (rad), servo angles (rad).
 */
typedef struct TailsimCommand {
  double c_nominal[2];
  double amplitude[2];
  double phi[2];
  double servo[2];
} TailsimCommand;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *tailsim_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tailsim_version(void);

/**
 * Default configuration.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum TailsimStatus tailsim_config_default(struct TailsimConfig **out);

/**
 * Parse and validate a TOML configuration.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TailsimStatus tailsim_config_from_toml(const char *toml, struct TailsimConfig **out);

/**
 * # Safety
 * `cfg` must be null or a handle from a `tailsim_config_*` constructor,
 * not yet freed.
 */
void tailsim_config_free(struct TailsimConfig *cfg);

/**
 * Map a desired wrench to actuator commands. `saturation` receives the
 * `TAILSIM_SAT_*` bits and may be null.
 *
 * # Safety
 * Pointers must be valid; `saturation` may be null.
 */
enum TailsimStatus tailsim_mix(const struct TailsimConfig *cfg,
                               enum TailsimVariant variant,
                               const struct TailsimWrench *desired,
                               struct TailsimCommand *out,
                               uint32_t *saturation);

/**
 * Wrench produced by an actuator command at the hover operating point.
 *
 * # Safety
 * Pointers must be valid.
 */
enum TailsimStatus tailsim_forward_map(const struct TailsimConfig *cfg,
                                       const struct TailsimCommand *cmd,
                                       struct TailsimWrench *out);

/**
 * Throttle of motor `motor` (1 or 2) at rotor angle `theta`, clamped to [0, 1].
 *
 * # Safety
 * `out` must be valid.
 */
enum TailsimStatus tailsim_cyclic_throttle(double c_nominal,
                                           double amplitude,
                                           double phi,
                                           double theta,
                                           uint32_t motor,
                                           double gamma0,
                                           double *out);

/**
 * Run the scenario selected in the configuration's `[scenario]` table.
 *
 * # Safety
 * `cfg` must be a live handle and `out` a valid pointer.
 */
enum TailsimStatus tailsim_run_scenario(const struct TailsimConfig *cfg,
                                        enum TailsimVariant variant,
                                        struct TailsimReport **out);

/**
 * # Safety
 * `report` must be null or a handle from [`tailsim_run_scenario`], not yet freed.
 */
void tailsim_report_free(struct TailsimReport *report);

/**
 * Headline metric by key, e.g. `pitch_err_max_deg`.
 *
 * # Safety
 * Pointers must be valid and `key` NUL-terminated.
 */
enum TailsimStatus tailsim_report_metric(const struct TailsimReport *report,
                                         const char *key,
                                         double *out);

/**
 * Number of recorded control ticks, or 0 for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t tailsim_report_trace_len(const struct TailsimReport *report);

/**
 * Fraction of ticks with any actuator saturated, or NaN for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
double tailsim_report_duty_any(const struct TailsimReport *report);

/**
 * Write the trace to `path` as CSV, keeping every `stride`-th row.
 *
 * # Safety
 * `report` must be a live handle and `path` NUL-terminated.
 */
enum TailsimStatus tailsim_report_write_csv(const struct TailsimReport *report,
                                            const char *path,
                                            size_t stride);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TAILSIM_H */
