#include <math.h>
#include <stdio.h>
#include <string.h>

#include "geored.h"

#define CHECK(cond)                                                    \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,           \
              geored_last_error() ? geored_last_error() : "no error"); \
      return 1;                                                        \
    }                                                                  \
  } while (0)

int main(void) {
  const char *names[] = {"theta", "phi"};
  double lo[] = {0.2, 0.0};
  double hi[] = {2.9, 6.0};
  GeoredChart *chart = NULL;
  CHECK(geored_chart_new(names, lo, hi, 2, &chart) == GEORED_STATUS_OK);

  GeoredExpr *f = NULL;
  GeoredExpr *df = NULL;
  CHECK(geored_expr_parse(chart, "sin(theta)^2", &f) == GEORED_STATUS_OK);
  CHECK(geored_expr_differentiate(f, "theta", &df) == GEORED_STATUS_OK);
  double point[] = {1.0, 0.5};
  double value = 0.0;
  CHECK(geored_expr_eval(df, point, 2, &value) == GEORED_STATUS_OK);
  CHECK(fabs(value - 2.0 * sin(1.0) * cos(1.0)) < 1e-12);

  GeoredExpr *bad = NULL;
  CHECK(geored_expr_parse(chart, "sin(", &bad) == GEORED_STATUS_EXPRESSION);
  CHECK(geored_last_error() != NULL);

  GeoredDof dof;
  CHECK(geored_dof_table("O(1,3)", 4, &dof) == GEORED_STATUS_OK);
  CHECK(dof.dim_h == 6 && dof.dim_quotient == 10 && dof.preserving == 24);

  double b1[] = {1, 0, 0, 1};
  double b2[] = {2, 0, 0, 2};
  bool same = true;
  CHECK(geored_same_orbit(b1, b2, 2, "O(0,2)", &same) == GEORED_STATUS_OK);
  CHECK(!same);
  CHECK(geored_same_orbit(b1, b2, 2, "W(0,2)", &same) == GEORED_STATUS_OK);
  CHECK(same);

  char *report = NULL;
  const char *manifest =
      "{\"chart\": {\"coords\": [\"x\"], \"domain\": [[0.5, 2]]},"
      " \"signature\": [0, 1], \"metric\": [[\"x^2\"]]}";
  CHECK(geored_analyze_manifest(manifest, geored_default_seed(), &report) == GEORED_STATUS_OK);
  CHECK(strstr(report, "\"all_pass\": true") != NULL);
  geored_string_free(report);

  geored_expr_free(df);
  geored_expr_free(f);
  geored_chart_free(chart);
  puts("ok");
  return 0;
}
