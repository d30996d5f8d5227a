#ifndef INFOPS_H
#define INFOPS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Outcome of a call. Values 2 to 4 match the command-line exit codes.
typedef enum InfopsStatus {
  INFOPS_STATUS_OK = 0,
  // A required pointer was null or a string was not UTF-8.
  INFOPS_STATUS_NULL_OR_ENCODING = 1,
  // Bad argument or input that failed validation.
  INFOPS_STATUS_INVALID = 2,
  INFOPS_STATUS_IO = 3,
  INFOPS_STATUS_NUMERICAL = 4,
  // A Rust panic was caught at the boundary.
  INFOPS_STATUS_INTERNAL = 5,
} InfopsStatus;

typedef enum InfopsKsMethod {
  // Exact when n·m is small enough, asymptotic otherwise.
  INFOPS_KS_METHOD_AUTO = 0,
  INFOPS_KS_METHOD_EXACT = 1,
  INFOPS_KS_METHOD_ASYMPTOTIC = 2,
} InfopsKsMethod;

typedef enum InfopsCoverageRule {
  INFOPS_COVERAGE_RULE_SQUARED_SHARE_NEAREST = 0,
  INFOPS_COVERAGE_RULE_MINIMAL_PREFIX = 1,
} InfopsCoverageRule;

// Opaque effect matrix.
typedef struct InfopsEffectMatrix InfopsEffectMatrix;

// Opaque list of selected links.
typedef struct InfopsLinks InfopsLinks;

typedef struct InfopsKsResult {
  double statistic;
  double p_value;
  // 1 when the null of equal distributions is rejected.
  int32_t reject;
  // 1 when the exact distribution was used.
  int32_t exact;
} InfopsKsResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null.
//
// The pointer stays valid until the next infops call on the same thread.
const char *infops_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *infops_version(void);

// Two-sample Kolmogorov-Smirnov test.
//
// # Safety
// `x` and `y` must point to `nx` and `ny` readable doubles; `result` must
// be writable.
enum InfopsStatus infops_ks_two_sample(const double *x,
                                       size_t nx,
                                       const double *y,
                                       size_t ny,
                                       double alpha,
                                       enum InfopsKsMethod method,
                                       struct InfopsKsResult *result);

// Periodic STL decomposition of `y` with default smoother spans.
//
// # Safety
// `y` must hold `n` doubles; each output buffer must have room for `n`.
enum InfopsStatus infops_stl(const double *y,
                             size_t n,
                             size_t period,
                             double *trend,
                             double *seasonal,
                             double *remainder);

// Discovers lagged parents of `k` series of length `n` (row-major, one
// series per row) and estimates standardized effects with OLS errors.
//
// # Safety
// `series` must hold `k * n` doubles; `matrix` must be writable.
enum InfopsStatus infops_causal_effects(const double *series,
                                        size_t k,
                                        size_t n,
                                        size_t tau_max,
                                        double alpha,
                                        size_t max_conds,
                                        struct InfopsEffectMatrix **matrix);

// Wraps a `k × k` row-major matrix indexed `[source][target]`.
//
// # Safety
// `values` must hold `k * k` doubles; `matrix` must be writable.
enum InfopsStatus infops_effects_from_values(const double *values,
                                             size_t k,
                                             struct InfopsEffectMatrix **matrix);

// Number of series covered by the matrix; 0 for null.
//
// # Safety
// `matrix` must be null or come from this library and not yet be freed.
size_t infops_effects_size(const struct InfopsEffectMatrix *matrix);

// Effect of `source` on `target` and its standard error.
//
// `lag` receives the lag of the strongest term, or 0 when there is no link.
// Any of the output pointers may be null.
//
// # Safety
// `matrix` must come from this library and not yet be freed.
enum InfopsStatus infops_effects_get(const struct InfopsEffectMatrix *matrix,
                                     size_t source,
                                     size_t target,
                                     double *value,
                                     double *stderr,
                                     size_t *lag);

// # Safety
// `matrix` must be null or come from this library and not yet be freed.
void infops_effects_free(struct InfopsEffectMatrix *matrix);

// Keeps the strongest off-diagonal links covering `coverage` of the
// total effect.
//
// # Safety
// `matrix` must come from this library and not yet be freed; `links` must
// be writable.
enum InfopsStatus infops_threshold_links(const struct InfopsEffectMatrix *matrix,
                                         double coverage,
                                         enum InfopsCoverageRule rule,
                                         bool include_auto,
                                         struct InfopsLinks **links);

// Effect level at which links were cut; NaN for null.
//
// # Safety
// `links` must be null or come from this library and not yet be freed.
double infops_links_threshold(const struct InfopsLinks *links);

// # Safety
// `links` must be null or come from this library and not yet be freed.
size_t infops_links_count(const struct InfopsLinks *links);

// The `index`-th selected link, strongest first.
//
// # Safety
// `links` must come from this library and not yet be freed; `source` and
// `target` must be writable.
enum InfopsStatus infops_links_get(const struct InfopsLinks *links,
                                   size_t index,
                                   size_t *source,
                                   size_t *target);

// # Safety
// `links` must be null or come from this library and not yet be freed.
void infops_links_free(struct InfopsLinks *links);

// Runs pipeline stages from a TOML configuration into `out_dir`.
//
// `stages` is a comma-separated list of stage names (`ingest`,
// `netbuild`, ...) or null for every stage. Prerequisites run too.
//
// # Safety
// String arguments must be NUL-terminated or, for `stages`, null.
enum InfopsStatus infops_run_pipeline(const char *config_path,
                                      const char *out_dir,
                                      const char *stages);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INFOPS_H */
