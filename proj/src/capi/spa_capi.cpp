#include "spa/spa.h"

#include <cstdio>
#include <cstring>
#include <new>
#include <string>

#include "../core/chromophores.hpp"
#include "../core/commands.hpp"
#include "../core/error.hpp"
#include "../core/log.hpp"
#include "../core/mc_transport.hpp"
#include "../core/metrics.hpp"
#include "../core/options.hpp"
#include "../core/phantom.hpp"
#include "../core/spa_image.hpp"
#include "../core/unmix.hpp"

struct spa_options {
  spa::Options impl;
};

struct spa_spectrum {
  spa::ChromophoreSpectrum impl;
};

struct spa_volume {
  spa::TissueVolume impl;
};

struct spa_energy_map {
  spa::AbsorbedEnergyMap impl;
};

namespace {

thread_local std::string g_last_error;

spa_status fail(spa_status status, const char* message) {
  g_last_error = message;
  return status;
}

spa_status status_of(const spa::DataError& e) {
  using Kind = spa::DataError::Kind;
  switch (e.kind()) {
    case Kind::Parse: return SPA_ERR_PARSE;
    case Kind::Io: return SPA_ERR_IO;
    case Kind::Version: return SPA_ERR_VERSION;
    case Kind::Truncated: return SPA_ERR_TRUNCATED;
    case Kind::Checksum: return SPA_ERR_CHECKSUM;
    case Kind::MissingEntry: return SPA_ERR_MISSING_ENTRY;
    case Kind::Mismatch: return SPA_ERR_MISMATCH;
  }
  return SPA_ERR_INTERNAL;
}

/// Runs `body`, translating exceptions into status codes.
template <class F>
spa_status guarded(F&& body) noexcept {
  try {
    body();
    g_last_error.clear();
    return SPA_OK;
  } catch (const spa::ConfigError& e) {
    return fail(SPA_ERR_CONFIG, e.what());
  } catch (const spa::ValidationError& e) {
    return fail(SPA_ERR_INVALID_ARGUMENT, e.what());
  } catch (const spa::RangeError& e) {
    return fail(SPA_ERR_RANGE, e.what());
  } catch (const spa::DataError& e) {
    return fail(status_of(e), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SPA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SPA_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SPA_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw spa::ValidationError(what);
}

const spa::Options& options_or_empty(const spa_options* opts) {
  static const spa::Options empty;
  return opts ? opts->impl : empty;
}

spa::Image image_from(const float* data, std::size_t count) {
  spa::Image img(1, static_cast<int>(count));
  for (std::size_t i = 0; i < count; ++i) img[i] = data[i];
  return img;
}

void copy_image(const spa::Image& img, float* out, std::size_t count) {
  require(out != nullptr, "output buffer is NULL");
  require(count == img.size(), "output buffer size does not match the image");
  for (std::size_t i = 0; i < count; ++i) out[i] = static_cast<float>(img[i]);
}

struct LogTarget {
  spa_log_fn fn;
  void* ctx;
};

}  // namespace

extern "C" {

const char* spa_version(void) { return "1.0.0"; }

const char* spa_status_name(spa_status status) {
  switch (status) {
    case SPA_OK: return "ok";
    case SPA_ERR_CONFIG: return "config error";
    case SPA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SPA_ERR_RANGE: return "range error";
    case SPA_ERR_PARSE: return "parse error";
    case SPA_ERR_IO: return "i/o error";
    case SPA_ERR_VERSION: return "version mismatch";
    case SPA_ERR_TRUNCATED: return "truncated data";
    case SPA_ERR_CHECKSUM: return "checksum failure";
    case SPA_ERR_MISSING_ENTRY: return "missing entry";
    case SPA_ERR_MISMATCH: return "data mismatch";
    case SPA_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* spa_last_error(void) { return g_last_error.c_str(); }

void spa_set_log_handler(spa_log_fn fn, void* ctx) {
  if (!fn) {
    spa::set_log_sink({});
    return;
  }
  spa::set_log_sink([target = LogTarget{fn, ctx}](std::string_view msg) {
    const std::string text(msg);
    target.fn(target.ctx, text.c_str());
  });
}

void spa_reset_log_handler(void) {
  spa::set_log_sink([](std::string_view msg) {
    std::fwrite(msg.data(), 1, msg.size(), stderr);
    std::fputc('\n', stderr);
  });
}

spa_status spa_options_create(spa_options** out) {
  return guarded([&] {
    require(out != nullptr, "out is NULL");
    *out = new spa_options{};
  });
}

void spa_options_destroy(spa_options* opts) { delete opts; }

spa_status spa_options_set(spa_options* opts, const char* key, const char* value) {
  return guarded([&] {
    require(opts && key && value, "NULL argument");
    opts->impl.set(key, value);
  });
}

spa_status spa_options_load_file(spa_options* opts, const char* path) {
  return guarded([&] {
    require(opts && path, "NULL argument");
    opts->impl.load_file(path);
  });
}

spa_status spa_cmd_generate(const spa_options* opts) {
  return guarded([&] { spa::commands::run_generate(options_or_empty(opts)); });
}
spa_status spa_cmd_noise(const spa_options* opts) {
  return guarded([&] { spa::commands::run_noise(options_or_empty(opts)); });
}
spa_status spa_cmd_unmix(const spa_options* opts) {
  return guarded([&] { spa::commands::run_unmix(options_or_empty(opts)); });
}
spa_status spa_cmd_eval(const spa_options* opts) {
  return guarded([&] { spa::commands::run_eval(options_or_empty(opts)); });
}
spa_status spa_cmd_export(const spa_options* opts) {
  return guarded([&] { spa::commands::run_export(options_or_empty(opts)); });
}
spa_status spa_cmd_augment(const spa_options* opts) {
  return guarded([&] { spa::commands::run_augment(options_or_empty(opts)); });
}

spa_status spa_spectrum_default(double hemoglobin_g_per_l, spa_spectrum** out) {
  return guarded([&] {
    require(out != nullptr, "out is NULL");
    *out = new spa_spectrum{spa::default_spectrum(hemoglobin_g_per_l)};
  });
}

spa_status spa_spectrum_parse(const char* csv_text, spa_spectrum** out) {
  return guarded([&] {
    require(csv_text && out, "NULL argument");
    *out = new spa_spectrum{spa::load_spectrum(csv_text)};
  });
}

spa_status spa_spectrum_load(const char* path, spa_spectrum** out) {
  return guarded([&] {
    require(path && out, "NULL argument");
    *out = new spa_spectrum{spa::load_spectrum_file(path)};
  });
}

void spa_spectrum_destroy(spa_spectrum* spectrum) { delete spectrum; }

spa_status spa_spectrum_absorption(const spa_spectrum* spectrum, double wavelength_nm, spa_chromophore chromophore,
                                   double* mu_a_out) {
  return guarded([&] {
    require(spectrum && mu_a_out, "NULL argument");
    require(chromophore == SPA_HBO2 || chromophore == SPA_HB, "unknown chromophore");
    *mu_a_out = spectrum->impl.absorption_at(
        wavelength_nm, chromophore == SPA_HBO2 ? spa::Chromophore::HbO2 : spa::Chromophore::Hb);
  });
}

spa_status spa_spectrum_blood_mu_a(const spa_spectrum* spectrum, double so2, double wavelength_nm,
                                   double* mu_a_out) {
  return guarded([&] {
    require(spectrum && mu_a_out, "NULL argument");
    *mu_a_out = spectrum->impl.blood_mu_a(so2, wavelength_nm);
  });
}

spa_status spa_volume_build(const spa_options* opts, const spa_spectrum* spectrum, spa_volume** out) {
  return guarded([&] {
    require(out != nullptr, "out is NULL");
    const auto config = spa::commands::phantom_config_from(options_or_empty(opts));
    const auto spec = spectrum ? spectrum->impl : spa::default_spectrum();
    *out = new spa_volume{spa::build_volume(config, spec)};
  });
}

void spa_volume_destroy(spa_volume* volume) { delete volume; }

spa_status spa_volume_dims(const spa_volume* volume, int dims_out[3]) {
  return guarded([&] {
    require(volume && dims_out, "NULL argument");
    const auto& labels = volume->impl.labels();
    dims_out[0] = labels.nx();
    dims_out[1] = labels.ny();
    dims_out[2] = labels.nz();
  });
}

size_t spa_volume_cylinder_count(const spa_volume* volume) {
  return volume ? volume->impl.cylinders().size() : 0;
}

spa_status spa_volume_mask_slice(const spa_volume* volume, float* out, size_t count) {
  return guarded([&] {
    require(volume != nullptr, "volume is NULL");
    copy_image(spa::vessel_mask_slice(volume->impl), out, count);
  });
}

spa_status spa_volume_so2_slice(const spa_volume* volume, float* out, size_t count) {
  return guarded([&] {
    require(volume != nullptr, "volume is NULL");
    copy_image(spa::gt_so2_slice(volume->impl), out, count);
  });
}

spa_status spa_simulate(const spa_volume* volume, double wavelength_nm, const spa_options* opts,
                        spa_energy_map** out) {
  return guarded([&] {
    require(volume && out, "NULL argument");
    const auto& o = options_or_empty(opts);
    *out = new spa_energy_map{spa::simulate(volume->impl, wavelength_nm, spa::commands::beam_from(o),
                                            spa::commands::transport_config_from(o))};
  });
}

void spa_energy_map_destroy(spa_energy_map* map) { delete map; }

spa_status spa_energy_map_totals(const spa_energy_map* map, double* deposited_out, double* escaped_out) {
  return guarded([&] {
    require(map != nullptr, "map is NULL");
    if (deposited_out) *deposited_out = map->impl.deposited_weight;
    if (escaped_out) *escaped_out = map->impl.escaped_weight;
  });
}

spa_status spa_energy_map_central_slice(const spa_energy_map* map, float* out, size_t count) {
  return guarded([&] {
    require(map != nullptr, "map is NULL");
    copy_image(spa::central_slice(map->impl), out, count);
  });
}

spa_status spa_energy_map_write_mcvol(const spa_energy_map* map, const char* path) {
  return guarded([&] {
    require(map && path, "NULL argument");
    spa::write_mcvol(path, map->impl);
  });
}

spa_status spa_nnls2(const double a[4], const double b[2], double x_out[2]) {
  return guarded([&] {
    require(a && b && x_out, "NULL argument");
    const auto x = spa::nnls2(std::array<double, 4>{a[0], a[1], a[2], a[3]}, {b[0], b[1]});
    x_out[0] = x.c_hbo2;
    x_out[1] = x.c_hb;
  });
}

spa_status spa_so2_from_conc(double c_hbo2, double c_hb, double* so2_out, int* valid_out) {
  return guarded([&] {
    require(so2_out != nullptr, "so2_out is NULL");
    require(c_hbo2 >= 0.0 && c_hb >= 0.0, "concentrations must be non-negative");
    const auto est = spa::so2_from_conc({c_hbo2, c_hb});
    *so2_out = est.so2;
    if (valid_out) *valid_out = est.valid ? 1 : 0;
  });
}

spa_status spa_dice_loss(const float* pred, const float* gt, size_t count, double* out) {
  return guarded([&] {
    require(pred && gt && out, "NULL argument");
    *out = spa::dice_loss(image_from(pred, count), image_from(gt, count));
  });
}

spa_status spa_hybrid_loss(const float* seg_pred, const float* seg_gt, const float* so2_pred, const float* so2_gt,
                           size_t count, spa_seg_loss kind, double* out) {
  return guarded([&] {
    require(seg_pred && seg_gt && so2_pred && so2_gt && out, "NULL argument");
    require(kind == SPA_SEG_LOSS_DICE || kind == SPA_SEG_LOSS_MSE, "unknown segmentation loss");
    *out = spa::hybrid_loss(image_from(seg_pred, count), image_from(seg_gt, count), image_from(so2_pred, count),
                            image_from(so2_gt, count),
                            kind == SPA_SEG_LOSS_DICE ? spa::SegLossKind::Dice : spa::SegLossKind::Mse);
  });
}

spa_status spa_plain_mse_loss(const float* pred, const float* gt, size_t count, double* out) {
  return guarded([&] {
    require(pred && gt && out, "NULL argument");
    *out = spa::plain_mse_loss(image_from(pred, count), image_from(gt, count));
  });
}

}  // extern "C"
