/*
 * C interface to the sPA simulation and oximetry toolkit.
 *
 * Every fallible call returns an spa_status. On failure the thread-local
 * message from spa_last_error() describes the problem. Objects are opaque
 * handles created by *_create / *_build / *_load calls and released with the
 * matching *_destroy; destroying NULL is a no-op.
 *
 * Images are passed as row-major float32 arrays (rows = depth, cols = lateral).
 */
#ifndef SPA_SPA_H
#define SPA_SPA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SPA_BUILDING_LIBRARY)
#    define SPA_API __declspec(dllexport)
#  else
#    define SPA_API __declspec(dllimport)
#  endif
#else
#  define SPA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spa_status {
  SPA_OK = 0,
  SPA_ERR_CONFIG = 1,           /* invalid or unknown configuration */
  SPA_ERR_INVALID_ARGUMENT = 2, /* precondition violated */
  SPA_ERR_RANGE = 3,            /* lookup outside a tabulated range */
  SPA_ERR_PARSE = 4,            /* malformed text input */
  SPA_ERR_IO = 5,               /* file system failure */
  SPA_ERR_VERSION = 6,          /* unsupported dataset format version */
  SPA_ERR_TRUNCATED = 7,        /* array blob shorter/longer than declared */
  SPA_ERR_CHECKSUM = 8,         /* CRC32 mismatch */
  SPA_ERR_MISSING_ENTRY = 9,    /* referenced sample or file does not exist */
  SPA_ERR_MISMATCH = 10,        /* inconsistent data, e.g. missing predictions */
  SPA_ERR_INTERNAL = 99
} spa_status;

typedef enum spa_chromophore { SPA_HBO2 = 0, SPA_HB = 1 } spa_chromophore;
typedef enum spa_seg_loss { SPA_SEG_LOSS_DICE = 0, SPA_SEG_LOSS_MSE = 1 } spa_seg_loss;

SPA_API const char* spa_version(void);
SPA_API const char* spa_status_name(spa_status status);
/* Message of the last failing call on this thread; "" if none. */
SPA_API const char* spa_last_error(void);

/* Progress messages. Passing NULL silences them; the default prints to stderr. */
typedef void (*spa_log_fn)(void* ctx, const char* message);
SPA_API void spa_set_log_handler(spa_log_fn fn, void* ctx);
SPA_API void spa_reset_log_handler(void);

/* ---- options: flat key/value configuration ------------------------------ */

typedef struct spa_options spa_options;

SPA_API spa_status spa_options_create(spa_options** out);
SPA_API void spa_options_destroy(spa_options* opts);
SPA_API spa_status spa_options_set(spa_options* opts, const char* key, const char* value);
/* Reads `key = value` lines ('#' comments); later calls override earlier keys. */
SPA_API spa_status spa_options_load_file(spa_options* opts, const char* path);

/* ---- pipeline commands (keys documented in README) ---------------------- */

SPA_API spa_status spa_cmd_generate(const spa_options* opts);
SPA_API spa_status spa_cmd_noise(const spa_options* opts);
SPA_API spa_status spa_cmd_unmix(const spa_options* opts);
SPA_API spa_status spa_cmd_eval(const spa_options* opts);
SPA_API spa_status spa_cmd_export(const spa_options* opts);
SPA_API spa_status spa_cmd_augment(const spa_options* opts);

/* ---- hemoglobin spectra ------------------------------------------------- */

typedef struct spa_spectrum spa_spectrum;

SPA_API spa_status spa_spectrum_default(double hemoglobin_g_per_l, spa_spectrum** out);
SPA_API spa_status spa_spectrum_parse(const char* csv_text, spa_spectrum** out);
SPA_API spa_status spa_spectrum_load(const char* path, spa_spectrum** out);
SPA_API void spa_spectrum_destroy(spa_spectrum* spectrum);
SPA_API spa_status spa_spectrum_absorption(const spa_spectrum* spectrum, double wavelength_nm,
                                           spa_chromophore chromophore, double* mu_a_out);
SPA_API spa_status spa_spectrum_blood_mu_a(const spa_spectrum* spectrum, double so2, double wavelength_nm,
                                           double* mu_a_out);

/* ---- phantom volumes ---------------------------------------------------- */

typedef struct spa_volume spa_volume;

/* Phantom keys from `opts` (NULL for defaults); `spectrum` NULL = built-in. */
SPA_API spa_status spa_volume_build(const spa_options* opts, const spa_spectrum* spectrum, spa_volume** out);
SPA_API void spa_volume_destroy(spa_volume* volume);
SPA_API spa_status spa_volume_dims(const spa_volume* volume, int dims_out[3]);
SPA_API size_t spa_volume_cylinder_count(const spa_volume* volume);
/* Central-slice ground truth, nz * nx floats. */
SPA_API spa_status spa_volume_mask_slice(const spa_volume* volume, float* out, size_t count);
SPA_API spa_status spa_volume_so2_slice(const spa_volume* volume, float* out, size_t count);

/* ---- Monte Carlo transport ---------------------------------------------- */

typedef struct spa_energy_map spa_energy_map;

/* Transport and beam keys from `opts` (NULL for defaults). */
SPA_API spa_status spa_simulate(const spa_volume* volume, double wavelength_nm, const spa_options* opts,
                                spa_energy_map** out);
SPA_API void spa_energy_map_destroy(spa_energy_map* map);
SPA_API spa_status spa_energy_map_totals(const spa_energy_map* map, double* deposited_out, double* escaped_out);
SPA_API spa_status spa_energy_map_central_slice(const spa_energy_map* map, float* out, size_t count);
SPA_API spa_status spa_energy_map_write_mcvol(const spa_energy_map* map, const char* path);

/* ---- unmixing and metrics on raw arrays --------------------------------- */

/* a: row-major 2x2 {700 HbO2, 700 Hb, 850 HbO2, 850 Hb}, any nonsingular matrix;
   x_out = argmin ||a x - b|| over x >= 0 as {c_hbo2, c_hb}. */
SPA_API spa_status spa_nnls2(const double a[4], const double b[2], double x_out[2]);
SPA_API spa_status spa_so2_from_conc(double c_hbo2, double c_hb, double* so2_out, int* valid_out);

SPA_API spa_status spa_dice_loss(const float* pred, const float* gt, size_t count, double* out);
SPA_API spa_status spa_hybrid_loss(const float* seg_pred, const float* seg_gt, const float* so2_pred,
                                   const float* so2_gt, size_t count, spa_seg_loss kind, double* out);
SPA_API spa_status spa_plain_mse_loss(const float* pred, const float* gt, size_t count, double* out);

#ifdef __cplusplus
}
#endif

#endif /* SPA_SPA_H */
