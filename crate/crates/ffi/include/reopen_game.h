#ifndef REOPEN_GAME_H
#define REOPEN_GAME_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RgStatus {
  RG_STATUS_OK = 0,
  RG_STATUS_NULL_POINTER = 1,
  RG_STATUS_INVALID_UTF8 = 2,
  RG_STATUS_DOMAIN = 3,
  RG_STATUS_VALIDATION = 4,
  RG_STATUS_INTEGRATION = 5,
  RG_STATUS_SOLVER = 6,
  RG_STATUS_SHAPE = 7,
  RG_STATUS_SINGULARITY = 8,
  RG_STATUS_CONFIG = 9,
  RG_STATUS_IO = 10,
  RG_STATUS_PANIC = 11,
} RgStatus;

typedef enum RgSeverityMode {
  RG_SEVERITY_MODE_MARGINAL = 0,
  RG_SEVERITY_MODE_EXPECTED = 1,
} RgSeverityMode;

/**
 * Validated scenario with its optional sweep settings.
 */
typedef struct RgScenario RgScenario;

/**
 * Rows of a completed sweep.
 */
typedef struct RgSweep RgSweep;

typedef struct RgEquilibrium {
  double theta_star;
  double reopen_prob;
  double coverage;
  double residual;
  bool unique;
  size_t num_roots;
} RgEquilibrium;

typedef struct RgVerifyReport {
  bool premise_holds;
  bool complementarity_holds;
  bool substitutes_restricted_holds;
  bool substitutes_reopened_holds;
  bool passed;
} RgVerifyReport;

typedef struct RgSweepRow {
  double sigma;
  double theta_star;
  double reopen_prob;
  double coverage;
  bool disease_free;
  double severity;
  /**
   * Set when the solver failed at this σ; numeric fields are NaN.
   */
  bool failed;
} RgSweepRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`) and returns its full length in bytes, excluding NUL.
 *
 * # Safety
 * `buf` must be null or valid for `len` writable bytes.
 */
size_t rg_last_error(char *buf, size_t len);

/**
 * Standard normal cdf.
 */
double rg_normal_cdf(double z);

/**
 * Standard normal quantile; `p` must lie in (0, 1).
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum RgStatus rg_normal_quantile(double p, double *out);

/**
 * Parses a configuration from a NUL-terminated string, TOML or JSON.
 *
 * # Safety
 * `text` must be a valid C string; `out` must be valid for one write. On
 * success `*out` owns a handle to release with [`rg_scenario_free`].
 */
enum RgStatus rg_scenario_from_str(const char *text, bool is_json, struct RgScenario **out);

/**
 * Loads a configuration file; `.json` files are read as JSON, others as TOML.
 *
 * # Safety
 * As for [`rg_scenario_from_str`], with `path` a valid C string.
 */
enum RgStatus rg_scenario_from_file(const char *path, struct RgScenario **out);

/**
 * # Safety
 * `scenario` must be null or a handle not yet freed.
 */
void rg_scenario_free(struct RgScenario *scenario);

/**
 * Number of information types, the length `rg_scenario_solve` expects for
 * its critical-signal buffer. Returns 0 for a null handle.
 *
 * # Safety
 * `scenario` must be null or a live handle.
 */
size_t rg_scenario_num_types(const struct RgScenario *scenario);

/**
 * Solves the equilibrium. Critical signals are written to `x_star` when it
 * is non-null, which then needs room for `rg_scenario_num_types` values.
 *
 * # Safety
 * `scenario` must be a live handle, `out` valid for one write and `x_star`
 * null or valid for `x_len` writes.
 */
enum RgStatus rg_scenario_solve(const struct RgScenario *scenario,
                                struct RgEquilibrium *out,
                                double *x_star,
                                size_t x_len);

/**
 * Runs the complement and substitute checks.
 *
 * # Safety
 * `scenario` must be a live handle and `out` valid for one write.
 */
enum RgStatus rg_scenario_verify(const struct RgScenario *scenario, struct RgVerifyReport *out);

/**
 * Sweeps the public precision over `sigmas`, or over the configured grid when
 * `sigmas` is null.
 *
 * # Safety
 * `scenario` must be a live handle, `sigmas` null or valid for `n` reads and
 * `out` valid for one write. On success `*out` owns a handle to release with
 * [`rg_sweep_free`].
 */
enum RgStatus rg_scenario_sweep(const struct RgScenario *scenario,
                                const double *sigmas,
                                size_t n,
                                enum RgSeverityMode mode,
                                struct RgSweep **out);

/**
 * # Safety
 * `sweep` must be null or a handle not yet freed.
 */
void rg_sweep_free(struct RgSweep *sweep);

/**
 * Number of rows; 0 for a null handle.
 *
 * # Safety
 * `sweep` must be null or a live handle.
 */
size_t rg_sweep_len(const struct RgSweep *sweep);

/**
 * # Safety
 * `sweep` must be a live handle and `out` valid for one write.
 */
enum RgStatus rg_sweep_row(const struct RgSweep *sweep, size_t index, struct RgSweepRow *out);

/**
 * Writes the sweep CSV to `path`.
 *
 * # Safety
 * `sweep` must be a live handle and `path` a valid C string.
 */
enum RgStatus rg_sweep_write_csv(const struct RgSweep *sweep, const char *path);

/**
 * Suggested precision interval for a reopening target. `*found` is false
 * when the interval is empty, in which case `lo` and `hi` are untouched.
 *
 * # Safety
 * `sweep` must be a live handle; `lo`, `hi`, `found` valid for one write.
 */
enum RgStatus rg_sweep_suggest(const struct RgSweep *sweep,
                               double target,
                               double *lo,
                               double *hi,
                               bool *found);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REOPEN_GAME_H */
