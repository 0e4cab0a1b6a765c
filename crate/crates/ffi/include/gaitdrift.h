#ifndef GAITDRIFT_H
#define GAITDRIFT_H

/* Generated by cbindgen from the gaitdrift-ffi crate. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of fallible calls.
 */
typedef enum {
  GD_STATUS_OK = 0,
  GD_STATUS_NULL_POINTER = 1,
  GD_STATUS_INVALID_ARGUMENT = 2,
  GD_STATUS_PARSE_ERROR = 3,
  GD_STATUS_IO_ERROR = 4,
  GD_STATUS_INVALID_CONFIG = 5,
  GD_STATUS_UNREACHABLE = 6,
  GD_STATUS_UNKNOWN_LAYOUT = 7,
  GD_STATUS_OUT_OF_RANGE = 8,
  GD_STATUS_PANIC = 9,
} GdStatus;

typedef enum {
  GD_ALTERNATIVE_TWO_SIDED = 0,
  GD_ALTERNATIVE_GREATER = 1,
  GD_ALTERNATIVE_LESS = 2,
} GdAlternative;

/**
 * Opaque decision series.
 */
typedef struct GdDriftSeries GdDriftSeries;

/**
 * Opaque event log.
 */
typedef struct GdEventLog GdEventLog;

typedef struct {
  double t_min;
  double t_max;
  double percentile_k;
} GdFilterConfig;

typedef struct {
  uint32_t window_len;
  double alpha;
  size_t min_support;
  /**
   * Support-weighted ensemble instead of the unweighted one.
   */
  bool weighted;
  double decision_threshold;
  GdAlternative alternative;
} GdDetectorConfig;

typedef struct {
  uint32_t day;
  double score;
  bool decision;
} GdDayDecision;

typedef struct {
  double u_statistic;
  double p_value;
  /**
   * Exact null distribution rather than the normal approximation.
   */
  bool exact;
} GdMwuResult;

typedef struct {
  double baseline_speed;
  double drifted_speed;
  uint32_t onset_day;
  uint32_t num_days;
  uint64_t seed;
  double sample_rate;
  double body_radius;
  double day_length;
} GdScenario;

typedef struct {
  double accuracy;
  double precision;
  double recall;
  double f1;
  /**
   * False when no alert was raised on or after the onset.
   */
  bool has_delay;
  uint32_t detection_delay;
  uint32_t tp;
  uint32_t tn;
  uint32_t fp;
  uint32_t fn_;
} GdEvalResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *gd_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gd_version(void);

/**
 * Parses CSV text `timestamp,sensor_id,status`.
 *
 * # Safety
 * `csv` must be NUL-terminated; `out` must be writable.
 */
GdStatus gd_event_log_from_csv(const char *csv,
                               double day_length,
                               bool has_header,
                               GdEventLog **out);

/**
 * Reads an event CSV file.
 *
 * # Safety
 * `path` must be NUL-terminated; `out` must be writable.
 */
GdStatus gd_event_log_from_file(const char *path,
                                double day_length,
                                bool has_header,
                                GdEventLog **out);

/**
 * Writes the log as CSV.
 *
 * # Safety
 * `log` must come from this library; `path` must be NUL-terminated.
 */
GdStatus gd_event_log_write_csv(const GdEventLog *log, const char *path);

/**
 * Number of events; 0 for NULL.
 *
 * # Safety
 * `log` must be NULL or come from this library.
 */
size_t gd_event_log_len(const GdEventLog *log);

/**
 * # Safety
 * `log` must be NULL or come from this library, and not be used afterwards.
 */
void gd_event_log_free(GdEventLog *log);

GdFilterConfig gd_filter_config_default(void);

GdDetectorConfig gd_detector_config_default(void);

/**
 * Runs drift detection. NULL configs select the defaults.
 *
 * # Safety
 * Pointers must be NULL or valid; `out` must be writable.
 */
GdStatus gd_detect(const GdEventLog *log,
                   const GdFilterConfig *filter,
                   const GdDetectorConfig *detector,
                   GdDriftSeries **out);

/**
 * Number of decided days; 0 for NULL.
 *
 * # Safety
 * `series` must be NULL or come from this library.
 */
size_t gd_drift_series_len(const GdDriftSeries *series);

/**
 * The `index`-th decided day, in increasing day order.
 *
 * # Safety
 * `series` must come from this library; `out` must be writable.
 */
GdStatus gd_drift_series_get(const GdDriftSeries *series, size_t index, GdDayDecision *out);

/**
 * # Safety
 * `series` must be NULL or come from this library, and not be used afterwards.
 */
void gd_drift_series_free(GdDriftSeries *series);

/**
 * Two-sample Mann-Whitney U test of `a` against `b`.
 *
 * # Safety
 * `a` and `b` must point to `n_a` and `n_b` readable doubles; `out` must be writable.
 */
GdStatus gd_mann_whitney_u(const double *a,
                           size_t n_a,
                           const double *b,
                           size_t n_b,
                           GdAlternative alternative,
                           GdMwuResult *out);

GdScenario gd_scenario_default(void);

/**
 * Simulates a scenario in a built-in layout (`"A"`..`"D"`) or a layout
 * TOML file. Ground truth follows from `onset_day` and `num_days`.
 *
 * # Safety
 * `layout` must be NUL-terminated, `scenario` readable and `out` writable.
 */
GdStatus gd_simulate(const char *layout, const GdScenario *scenario, GdEventLog **out);

/**
 * Scores a series against labels that switch to drift on `onset_day`
 * (use `num_days + 1` for no drift).
 *
 * # Safety
 * `series` must come from this library; `out` must be writable.
 */
GdStatus gd_score(const GdDriftSeries *series,
                  uint32_t onset_day,
                  uint32_t num_days,
                  bool warmup_as_negative,
                  GdEvalResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GAITDRIFT_H */
