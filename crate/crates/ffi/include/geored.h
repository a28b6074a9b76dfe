#ifndef GEORED_H
#define GEORED_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result codes. The first four match the exit codes of the `geored` binary.
 */
typedef enum GeoredStatus {
  GEORED_STATUS_OK = 0,
  GEORED_STATUS_CHECK_FAILED = 1,
  GEORED_STATUS_INVALID_INPUT = 2,
  GEORED_STATUS_EXPRESSION = 3,
  GEORED_STATUS_NULL_POINTER = 4,
  GEORED_STATUS_INVALID_UTF8 = 5,
  GEORED_STATUS_PANIC = 6,
} GeoredStatus;

/**
 * A coordinate chart with its sampling box.
 */
typedef struct GeoredChart GeoredChart;

/**
 * An expression bound to the chart it was parsed against.
 */
typedef struct GeoredExpr GeoredExpr;

/**
 * Dimension ledger of a reduction `GL(n) -> H`.
 */
typedef struct GeoredDof {
  size_t dim_h;
  size_t dim_quotient;
  size_t connections;
  size_t preserving;
  size_t symmetric;
  size_t symmetric_preserving;
} GeoredDof;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, or NULL.
 * Valid until the next geored call on the same thread.
 */
const char *geored_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void geored_string_free(char *s);

/**
 * Creates a chart with coordinates `names[i]` sampled on `(lo[i], hi[i])`.
 *
 * # Safety
 * `names`, `lo` and `hi` must each point to `n` valid elements and every
 * name must be a NUL-terminated string. `out_chart` must be writable.
 */
enum GeoredStatus geored_chart_new(const char *const *names,
                                   const double *lo,
                                   const double *hi,
                                   size_t n,
                                   struct GeoredChart **out_chart);

/**
 * Declares a named numeric constant on the chart.
 *
 * # Safety
 * `chart` must be a live handle and `name` a NUL-terminated string.
 */
enum GeoredStatus geored_chart_set_constant(struct GeoredChart *chart,
                                            const char *name,
                                            double value);

/**
 * # Safety
 * `chart` must be NULL or a handle from [`geored_chart_new`] not yet freed.
 */
void geored_chart_free(struct GeoredChart *chart);

/**
 * Parses `source` against the coordinates and constants of `chart`.
 *
 * # Safety
 * `chart` must be a live handle, `source` a NUL-terminated string and
 * `out_expr` writable.
 */
enum GeoredStatus geored_expr_parse(const struct GeoredChart *chart,
                                    const char *source,
                                    struct GeoredExpr **out_expr);

/**
 * Derivative with respect to the coordinate `var`.
 *
 * # Safety
 * `expr` must be a live handle, `var` a NUL-terminated string and
 * `out_expr` writable.
 */
enum GeoredStatus geored_expr_differentiate(const struct GeoredExpr *expr,
                                            const char *var,
                                            struct GeoredExpr **out_expr);

/**
 * Evaluates at the point whose coordinates are `point[0..n]`, in chart order.
 *
 * # Safety
 * `expr` must be a live handle, `point` must hold `n` values and `value`
 * must be writable.
 */
enum GeoredStatus geored_expr_eval(const struct GeoredExpr *expr,
                                   const double *point,
                                   size_t n,
                                   double *value);

/**
 * Probabilistic zero test on the chart's box with the default seed.
 *
 * # Safety
 * `expr` must be a live handle and `result` writable.
 */
enum GeoredStatus geored_expr_is_zero(const struct GeoredExpr *expr,
                                      size_t samples,
                                      double tol,
                                      bool *result);

/**
 * Canonical text of the expression; free with [`geored_string_free`].
 *
 * # Safety
 * `expr` must be a live handle and `text` writable.
 */
enum GeoredStatus geored_expr_to_string(const struct GeoredExpr *expr, char **text);

/**
 * # Safety
 * `expr` must be NULL or a handle from this library not yet freed.
 */
void geored_expr_free(struct GeoredExpr *expr);

/**
 * Dimension ledger for a tag such as `O(1,3)`, `W`, `SL`, `Id`,
 * `Unimodular` or `TimeGauge`.
 *
 * # Safety
 * `tag` must be a NUL-terminated string and `dof` writable.
 */
enum GeoredStatus geored_dof_table(const char *tag, size_t n, struct GeoredDof *dof);

/**
 * Whether the row-major `n`×`n` matrix `h` lies in the subgroup `tag`.
 *
 * # Safety
 * `h` must hold `n*n` values, `tag` must be NUL-terminated and `result`
 * writable.
 */
enum GeoredStatus geored_in_subgroup(const double *h, size_t n, const char *tag, bool *result);

/**
 * Whether two row-major bases lie in one orbit of the subgroup `tag`.
 *
 * # Safety
 * `b1` and `b2` must each hold `n*n` values, `tag` must be NUL-terminated
 * and `result` writable.
 */
enum GeoredStatus geored_same_orbit(const double *b1,
                                    const double *b2,
                                    size_t n,
                                    const char *tag,
                                    bool *result);

/**
 * Runs every applicable check on a JSON scene manifest and writes the JSON
 * report to `report`. Returns `CheckFailed` when the report was produced
 * but some check failed; `report` is set in that case too.
 *
 * # Safety
 * `manifest` must be a NUL-terminated string and `report` writable.
 */
enum GeoredStatus geored_analyze_manifest(const char *manifest, uint64_t seed, char **report);

/**
 * The sampling seed the CLI uses when none is given.
 */
uint64_t geored_default_seed(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GEORED_H */
