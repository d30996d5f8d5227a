#include <math.h>
#include <stdio.h>
#include <string.h>

#include "infops.h"

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      const char *m = infops_last_error_message();                    \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond,  \
              m ? m : "no message");                                  \
      return 1;                                                       \
    }                                                                 \
  } while (0)

int main(void) {
  double x[] = {0.1, 0.2, 0.3, 0.4};
  double y[] = {1.1, 1.2, 1.3, 1.4};
  InfopsKsResult ks;
  CHECK(infops_ks_two_sample(x, 4, y, 4, 0.05, INFOPS_KS_METHOD_EXACT, &ks) == INFOPS_STATUS_OK);
  CHECK(ks.statistic == 1.0);
  CHECK(fabs(ks.p_value - 2.0 / 70.0) < 1e-12);
  CHECK(ks.reject == 1 && ks.exact == 1);

  CHECK(infops_ks_two_sample(NULL, 4, y, 4, 0.05, INFOPS_KS_METHOD_AUTO, &ks) ==
        INFOPS_STATUS_NULL_OR_ENCODING);
  CHECK(infops_last_error_message() != NULL);
  CHECK(infops_ks_two_sample(x, 4, y, 4, 1.5, INFOPS_KS_METHOD_AUTO, &ks) == INFOPS_STATUS_INVALID);

  double values[9] = {0.0, 0.5, 0.1, 0.0, 0.0, 0.4, 0.05, 0.0, 0.0};
  InfopsEffectMatrix *m = NULL;
  CHECK(infops_effects_from_values(values, 3, &m) == INFOPS_STATUS_OK);
  CHECK(infops_effects_size(m) == 3);
  double v;
  CHECK(infops_effects_get(m, 0, 1, &v, NULL, NULL) == INFOPS_STATUS_OK && v == 0.5);
  CHECK(infops_effects_get(m, 3, 0, &v, NULL, NULL) == INFOPS_STATUS_INVALID);

  InfopsLinks *links = NULL;
  CHECK(infops_threshold_links(m, 0.75, INFOPS_COVERAGE_RULE_SQUARED_SHARE_NEAREST, false, &links) ==
        INFOPS_STATUS_OK);
  CHECK(infops_links_count(links) == 1);
  CHECK(infops_links_threshold(links) == 0.5);
  size_t s, t;
  CHECK(infops_links_get(links, 0, &s, &t) == INFOPS_STATUS_OK && s == 0 && t == 1);
  infops_links_free(links);
  infops_effects_free(m);
  infops_effects_free(NULL);

  printf("ok %s\n", infops_version());
  return 0;
}
