#ifndef SHAKETAB_H
#define SHAKETAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every call.
typedef enum StStatus {
  ST_STATUS_OK = 0,
  // A required pointer argument was null.
  ST_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  ST_STATUS_INVALID_UTF8 = 2,
  // Invalid configuration or parameter.
  ST_STATUS_CONFIG = 3,
  // Unreadable or inconsistent input data.
  ST_STATUS_INPUT_DATA = 4,
  // A numerical failure such as a diverging run.
  ST_STATUS_NUMERICAL = 5,
  // A named column does not exist.
  ST_STATUS_NOT_FOUND = 6,
  // A Rust panic was caught at the boundary.
  ST_STATUS_PANIC = 7,
} StStatus;

// Ground-motion acceleration record, in g.
typedef struct StGroundMotion StGroundMotion;

// Logged signals of one finished run.
typedef struct StRecord StRecord;

// Scenario configuration.
typedef struct StScenario StScenario;

// NRMSE of displacement, velocity and acceleration.
typedef struct StNrmse {
  double displacement;
  double velocity;
  double acceleration;
} StNrmse;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *st_version(void);

// Message of the last failed call on this thread, or an empty string.
// The pointer stays valid until the next call on the same thread.
const char *st_last_error(void);

// Frees a string returned by this library.
void st_string_free(char *s);

// Scenario with every key at its default.
enum StStatus st_scenario_default(struct StScenario **out);

// Parses `key = value` scenario text. Relative paths resolve against
// `base_dir`, which may be null.
enum StStatus st_scenario_parse(const char *text, const char *base_dir, struct StScenario **out);

// Loads a scenario file.
enum StStatus st_scenario_load(const char *path, struct StScenario **out);

// Serializes the scenario; free the result with [`st_string_free`].
enum StStatus st_scenario_to_text(const struct StScenario *scenario, char **out);

void st_scenario_free(struct StScenario *scenario);

// Runs the scenario. The output path in the scenario is ignored; use
// [`st_record_write_csv`] to save the result.
enum StStatus st_simulate(const struct StScenario *scenario, struct StRecord **out);

void st_record_free(struct StRecord *record);

// Number of samples per column.
size_t st_record_len(const struct StRecord *record);

// Borrows a named column. The data stays valid until the record is freed.
enum StStatus st_record_column(const struct StRecord *record,
                               const char *name,
                               const double **data,
                               size_t *len);

// NRMSE summary after skipping the first `skip_s` seconds.
enum StStatus st_record_nrmse(const struct StRecord *record, double skip_s, struct StNrmse *out);

enum StStatus st_record_write_csv(const struct StRecord *record, const char *path);

// Reads a PEER AT2 record.
enum StStatus st_ground_motion_load(const char *path, struct StGroundMotion **out);

void st_ground_motion_free(struct StGroundMotion *motion);

// Sample interval in seconds, or 0 for a null handle.
double st_ground_motion_dt(const struct StGroundMotion *motion);

// Record id, valid until the handle is freed.
const char *st_ground_motion_id(const struct StGroundMotion *motion);

// Borrows the acceleration samples (g).
enum StStatus st_ground_motion_samples(const struct StGroundMotion *motion,
                                       const double **data,
                                       size_t *len);

// NRMSE of `measured` against `reference`, both of length `n`.
enum StStatus st_nrmse(const double *reference, const double *measured, size_t n, double *out);

// Magnitude and phase (rad) of `vd`, `va` or `butterworth` at `omega` rad/s.
// `cutoff_hz` only applies to `butterworth`.
enum StStatus st_freq_response(const char *system,
                               double cutoff_hz,
                               double omega,
                               double *magnitude,
                               double *phase);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SHAKETAB_H */
