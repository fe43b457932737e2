#include <math.h>
#include <stdio.h>
#include "logpot.h"

#define CHECK(call)                                                      \
  do {                                                                   \
    enum LpStatus st_ = (call);                                          \
    if (st_ != LP_STATUS_OK) {                                           \
      fprintf(stderr, "%s -> %d: %s\n", #call, (int)st_, lp_last_error()); \
      return 1;                                                          \
    }                                                                    \
  } while (0)

int main(void) {
  double top[3];
  CHECK(lp_disc_top3(1.0, top));
  if (fabs(top[0] - top[2]) > 1e-12) return 2;

  LpMask *m = NULL;
  CHECK(lp_mask_from_shape("disc:0.5", 0.1, &m));
  LpMask *p = NULL;
  CHECK(lp_mask_polarize(m, LP_GRID_NORMAL_POS_X, 1, &p));
  LpSpectrum *s = NULL;
  CHECK(lp_solve(p, "log", 2, &s));
  double tau = 0.0;
  CHECK(lp_spectrum_top(s, 0, &tau, NULL));
  char *json = NULL;
  CHECK(lp_spectrum_to_json(s, &json));
  printf("%zu cells, tau1 = %.6f\n%s\n", lp_mask_cell_count(p), tau, json);
  lp_string_free(json);

  if (lp_mask_from_shape("disc:-1", 0.1, &m) != LP_STATUS_VALIDATION) return 3;

  lp_spectrum_free(s);
  lp_mask_free(p);
  lp_mask_free(m);
  return 0;
}
