/* Exercises libspa through its C header only. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "spa/spa.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: FAILED %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

static void quiet(void* ctx, const char* message) {
  (void)message;
  ++*(int*)ctx;
}

static void test_errors(void) {
  spa_options* opts = NULL;
  EXPECT(spa_options_create(&opts) == SPA_OK);
  EXPECT(spa_options_set(opts, "samples", "1") == SPA_OK);
  /* generate without an output directory */
  EXPECT(spa_cmd_generate(opts) == SPA_ERR_CONFIG);
  EXPECT(strlen(spa_last_error()) > 0);
  EXPECT(strcmp(spa_status_name(SPA_ERR_CHECKSUM), "checksum failure") == 0);
  EXPECT(spa_options_load_file(opts, "/nonexistent/spa.cfg") != SPA_OK);
  EXPECT(spa_options_create(NULL) == SPA_ERR_INVALID_ARGUMENT);
  spa_options_destroy(opts);
  spa_options_destroy(NULL);
  EXPECT(spa_version()[0] != '\0');
}

static void test_math(void) {
  const double id[4] = {1, 0, 0, 1};
  const double b[2] = {-0.5, 1.0};
  const double sing[4] = {1, 2, 2, 4};
  double x[2];
  double so2;
  int valid;
  EXPECT(spa_nnls2(id, b, x) == SPA_OK);
  EXPECT(x[0] == 0.0 && x[1] == 1.0);
  EXPECT(spa_nnls2(sing, b, x) == SPA_ERR_INVALID_ARGUMENT);
  EXPECT(spa_so2_from_conc(0.5, 0.5, &so2, &valid) == SPA_OK);
  EXPECT(so2 == 0.5 && valid == 1);
  EXPECT(spa_so2_from_conc(0.0, 0.0, &so2, &valid) == SPA_OK);
  EXPECT(valid == 0);

  {
    float seg[4] = {1, 1, 0, 0};
    float so2p[4] = {0.6f, 0.7f, 9.0f, -3.0f};
    float so2g[4] = {0.5f, 0.6f, 0.0f, 0.0f};
    double loss;
    EXPECT(spa_hybrid_loss(seg, seg, so2p, so2g, 4, SPA_SEG_LOSS_DICE, &loss) == SPA_OK);
    EXPECT(fabs(loss - 0.005) < 1e-6);
    EXPECT(spa_dice_loss(seg, seg, 4, &loss) == SPA_OK);
    EXPECT(loss < 1e-6);
    EXPECT(spa_plain_mse_loss(so2g, so2g, 4, &loss) == SPA_OK);
    EXPECT(loss == 0.0);
    EXPECT(spa_hybrid_loss(seg, so2g, so2p, so2g, 0, SPA_SEG_LOSS_DICE, &loss) != SPA_OK);
  }
}

static void test_spectrum(void) {
  spa_spectrum* s = NULL;
  double mua;
  EXPECT(spa_spectrum_default(150.0, &s) == SPA_OK);
  EXPECT(spa_spectrum_absorption(s, 700.0, SPA_HB, &mua) == SPA_OK);
  EXPECT(mua > 0.0);
  EXPECT(spa_spectrum_absorption(s, 400.0, SPA_HB, &mua) == SPA_ERR_RANGE);
  EXPECT(spa_spectrum_blood_mu_a(s, 1.5, 700.0, &mua) != SPA_OK);
  spa_spectrum_destroy(s);
  s = NULL;
  EXPECT(spa_spectrum_parse("wavelength_nm,hbo2,hb\n700,1,2\nbad\n", &s) == SPA_ERR_PARSE);
  EXPECT(s == NULL);
}

static void test_transport(void) {
  spa_options* opts = NULL;
  spa_volume* vol = NULL;
  spa_energy_map* map = NULL;
  int dims[3];
  double dep, esc;
  float* slice;
  size_t n;
  int logs = 0;

  spa_set_log_handler(quiet, &logs);
  EXPECT(spa_options_create(&opts) == SPA_OK);
  spa_options_set(opts, "grid_dims", "24");
  spa_options_set(opts, "seed", "3");
  spa_options_set(opts, "masked_rows", "8");
  spa_options_set(opts, "volume_size_mm", "12");
  spa_options_set(opts, "photons", "5000");
  spa_options_set(opts, "roulette_threshold", "0");
  EXPECT(spa_volume_build(opts, NULL, &vol) == SPA_OK || (fprintf(stderr, "%s\n", spa_last_error()), 0));
  EXPECT(spa_volume_dims(vol, dims) == SPA_OK);
  EXPECT(dims[0] == 24 && dims[1] == 24 && dims[2] == 24);
  EXPECT(spa_volume_cylinder_count(vol) >= 1);
  n = (size_t)dims[0] * dims[2];
  slice = (float*)malloc(n * sizeof(float));
  EXPECT(spa_volume_mask_slice(vol, slice, n) == SPA_OK);
  EXPECT(spa_volume_mask_slice(vol, slice, n - 1) == SPA_ERR_INVALID_ARGUMENT);

  EXPECT(spa_simulate(vol, 700.0, opts, &map) == SPA_OK);
  EXPECT(spa_energy_map_totals(map, &dep, &esc) == SPA_OK);
  EXPECT(fabs(dep + esc - 1.0) <= 1e-6);
  EXPECT(spa_energy_map_central_slice(map, slice, n) == SPA_OK);
  EXPECT(spa_simulate(vol, 300.0, opts, &map) == SPA_ERR_INVALID_ARGUMENT);

  free(slice);
  spa_energy_map_destroy(map);
  spa_volume_destroy(vol);
  spa_options_destroy(opts);
  spa_reset_log_handler();
}

int main(void) {
  test_errors();
  test_math();
  test_spectrum();
  test_transport();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("capi: all checks passed\n");
  return 0;
}
