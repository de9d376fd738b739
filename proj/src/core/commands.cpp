#include "commands.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <unordered_set>

#include "dataset.hpp"
#include "error.hpp"
#include "log.hpp"
#include "raw_io.hpp"
#include "rng.hpp"
#include "spa_image.hpp"
#include "unmix.hpp"

namespace spa::commands {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kPhantomTag = 0x7068'616e'746f'6d00ull;
constexpr std::uint64_t kTransportTag = 0x7472'616e'7370'6f72ull;
constexpr std::uint64_t kSplitTag = 0x7370'6c69'7473'6565ull;

#define SPA_PHANTOM_KEYS                                                                                 \
  "volume_size_mm", "grid_dims", "epidermis_mm", "dermis_mm", "breast_mm", "min_cylinders", "max_cylinders", \
      "min_radius_mm", "max_radius_mm", "min_so2", "max_so2", "masked_rows"
#define SPA_TRANSPORT_KEYS \
  "photons", "roulette_threshold", "roulette_factor", "threads", "beam_diameter_mm", "beam_center_mm"
#define SPA_SPECTRUM_KEYS "spectrum", "hb_g_per_l"

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

Vec3 get_vec3(const Options& opts, std::string_view key, Vec3 fallback) {
  const auto v = opts.find(key);
  if (!v) return fallback;
  const auto xs = parse_real_list(*v, key);
  if (xs.size() == 1) return {xs[0], xs[0], xs[0]};
  if (xs.size() == 3) return {xs[0], xs[1], xs[2]};
  throw ConfigError("option '" + std::string(key) + "' needs one or three values");
}

/// Resolved key/value pairs written to run.log.
class RunLog {
 public:
  explicit RunLog(std::string command) : command_(std::move(command)) {}
  void add(const std::string& key, const std::string& value) { values_[key] = value; }
  void add(const std::string& key, double value) { values_[key] = fmt(value); }

  void write(const fs::path& dir) const {
    std::string text = "command = " + command_ + "\n";
    for (const auto& [k, v] : values_) text += k + " = " + v + "\n";
    raw_io::write_file(dir / "run.log", text);
  }

 private:
  std::string command_;
  std::map<std::string, std::string> values_;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError(DataError::Kind::Io, "cannot create " + dir.string() + ": " + ec.message());
}

/// Refuses to write into an existing dataset unless `overwrite` is set, in
/// which case its manifest and samples are removed first.
void prepare_dataset_dir(const fs::path& dir, bool overwrite) {
  if (fs::exists(dir / kManifestName)) {
    if (!overwrite) {
      throw ConfigError(dir.string() + " already contains a dataset (set overwrite = true to replace it)");
    }
    std::error_code ec;
    fs::remove(dir / kManifestName, ec);
    fs::remove_all(dir / "samples", ec);
    fs::remove_all(dir / "volumes", ec);
  }
  ensure_dir(dir);
}

std::string snr_label(double snr) {
  char buf[32];
  if (snr == std::floor(snr) && std::abs(snr) < 1e9) {
    std::snprintf(buf, sizeof buf, "snr_%lld", static_cast<long long>(snr));
  } else {
    std::snprintf(buf, sizeof buf, "snr_%g", snr);
  }
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

SegLossKind seg_loss_for(std::string_view setting, Provenance provenance) {
  if (setting == "dice") return SegLossKind::Dice;
  if (setting == "mse") return SegLossKind::Mse;
  if (setting == "auto") return provenance == Provenance::Simulated ? SegLossKind::Dice : SegLossKind::Mse;
  throw ConfigError("seg_loss must be dice, mse or auto");
}

}  // namespace

PhantomConfig phantom_config_from(const Options& opts) {
  PhantomConfig c;
  c.volume_size_mm = get_vec3(opts, "volume_size_mm", c.volume_size_mm);
  const Vec3 dims = get_vec3(opts, "grid_dims", {128, 128, 128});
  for (double d : {dims.x, dims.y, dims.z}) {
    if (d != std::floor(d) || d < 1 || d > 4096) throw ConfigError("grid_dims must be positive integers");
  }
  c.grid_dims = {static_cast<int>(dims.x), static_cast<int>(dims.y), static_cast<int>(dims.z)};
  c.epidermis_mm = opts.get_double("epidermis_mm", c.epidermis_mm);
  c.dermis_mm = opts.get_double("dermis_mm", c.dermis_mm);
  // Breast fills the rest of the volume unless set explicitly.
  c.breast_mm = opts.get_double("breast_mm", c.volume_size_mm.z - c.epidermis_mm - c.dermis_mm);
  c.min_cylinders = static_cast<int>(opts.get_int("min_cylinders", c.min_cylinders));
  c.max_cylinders = static_cast<int>(opts.get_int("max_cylinders", c.max_cylinders));
  c.min_radius_mm = opts.get_double("min_radius_mm", c.min_radius_mm);
  c.max_radius_mm = opts.get_double("max_radius_mm", c.max_radius_mm);
  c.min_so2 = opts.get_double("min_so2", c.min_so2);
  c.max_so2 = opts.get_double("max_so2", c.max_so2);
  c.masked_rows = static_cast<int>(opts.get_int("masked_rows", c.masked_rows));
  c.seed = opts.get_u64("seed", 0);
  c.validate();
  return c;
}

TransportConfig transport_config_from(const Options& opts) {
  TransportConfig t;
  t.n_photons = opts.get_u64("photons", t.n_photons);
  t.roulette_threshold = opts.get_double("roulette_threshold", t.roulette_threshold);
  t.roulette_factor = static_cast<int>(opts.get_int("roulette_factor", t.roulette_factor));
  t.threads = static_cast<unsigned>(opts.get_u64("threads", 0));
  t.seed = opts.get_u64("seed", 0);
  t.validate();
  return t;
}

BeamSpec beam_from(const Options& opts) {
  BeamSpec b;
  b.diameter_mm = opts.get_double("beam_diameter_mm", b.diameter_mm);
  if (!(b.diameter_mm > 0.0)) throw ConfigError("beam_diameter_mm must be positive");
  if (const auto v = opts.find("beam_center_mm")) {
    const auto xs = parse_real_list(*v, "beam_center_mm");
    if (xs.size() != 2) throw ConfigError("beam_center_mm needs two values");
    b.center_mm = std::array<double, 2>{xs[0], xs[1]};
  }
  return b;
}

ChromophoreSpectrum spectrum_from(const Options& opts) {
  if (const auto path = opts.find("spectrum")) {
    if (opts.has("hb_g_per_l")) throw ConfigError("spectrum and hb_g_per_l are mutually exclusive");
    try {
      return load_spectrum_file(*path);
    } catch (const DataError& e) {
      if (e.kind() == DataError::Kind::Io) throw ConfigError(e.what());
      throw;
    }
  }
  const double hb = opts.get_double("hb_g_per_l", kDefaultHemoglobinGramsPerLiter);
  if (!(hb > 0.0)) throw ConfigError("hb_g_per_l must be positive");
  return default_spectrum(hb);
}

void run_generate(const Options& opts) {
  opts.require_known({"out", "seed", "samples", "overwrite", "dump_volumes", SPA_PHANTOM_KEYS, SPA_TRANSPORT_KEYS,
                      SPA_SPECTRUM_KEYS},
                     "generate");
  const fs::path out = opts.require_string("out");
  const std::uint64_t seed = opts.get_u64("seed", 0);
  const std::int64_t n_samples = opts.get_int("samples", 10);
  if (n_samples < 0) throw ConfigError("samples must be non-negative");
  const bool dump_volumes = opts.get_bool("dump_volumes", false);
  PhantomConfig phantom = phantom_config_from(opts);
  TransportConfig transport = transport_config_from(opts);
  const BeamSpec beam = beam_from(opts);
  const ChromophoreSpectrum spectrum = spectrum_from(opts);

  json config = {
      {"command", "generate"},
      {"seed", seed},
      {"samples", n_samples},
      {"volume_size_mm", {phantom.volume_size_mm.x, phantom.volume_size_mm.y, phantom.volume_size_mm.z}},
      {"grid_dims", phantom.grid_dims},
      {"layer_thickness_mm", {phantom.epidermis_mm, phantom.dermis_mm, phantom.breast_mm}},
      {"cylinders", {phantom.min_cylinders, phantom.max_cylinders}},
      {"radius_mm", {phantom.min_radius_mm, phantom.max_radius_mm}},
      {"so2_range", {phantom.min_so2, phantom.max_so2}},
      {"masked_rows", phantom.masked_rows},
      {"photons", transport.n_photons},
      {"roulette_threshold", transport.roulette_threshold},
      {"roulette_factor", transport.roulette_factor},
      {"beam_diameter_mm", beam.diameter_mm},
      {"spectrum_csv", format_spectrum_csv(spectrum)},
      {"pipeline", "slice,mask,normalize"},
  };
  if (beam.center_mm) config["beam_center_mm"] = *beam.center_mm;

  RunLog log("generate");
  for (const auto& [k, v] : config.items()) {
    if (k != "command" && k != "spectrum_csv") log.add(k, v.dump());
  }
  log.add("threads", std::to_string(transport.threads));
  log.add("dump_volumes", dump_volumes ? "true" : "false");
  log.add("spectrum", opts.get_string("spectrum", "built-in (" + fmt(opts.get_double("hb_g_per_l", 150.0)) +
                                                        " g/L hemoglobin)"));

  prepare_dataset_dir(out, opts.get_bool("overwrite", false));
  Dataset ds = Dataset::create(out, phantom.grid_dims[2], phantom.grid_dims[0], config);
  if (dump_volumes) ensure_dir(out / "volumes");

  Stopwatch total;
  std::vector<std::string> ids;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    Stopwatch sample_clock;
    char id_buf[32];
    std::snprintf(id_buf, sizeof id_buf, "sim_%06lld", static_cast<long long>(i));
    const std::string id = id_buf;

    PhantomConfig pc = phantom;
    pc.seed = derive_seed(seed, kPhantomTag, static_cast<std::uint64_t>(i));
    const TissueVolume volume = build_volume(pc, spectrum);

    SpaPair pair;
    pair.seed = pc.seed;
    for (int w = 0; w < 2; ++w) {
      const double wl = kStudyWavelengths[w];
      TransportConfig tc = transport;
      tc.seed = derive_seed(seed, kTransportTag, static_cast<std::uint64_t>(i) * 2 + w);
      const AbsorbedEnergyMap map = simulate(volume, wl, beam, tc);
      if (dump_volumes) write_mcvol(out / "volumes" / (id + "_" + std::to_string(int(wl)) + ".mcvol"), map);
      SpaImage& img = w == 0 ? pair.img700 : pair.img850;
      img.wavelength_nm = wl;
      img.pixels = mask_top_rows(central_slice(map), phantom.masked_rows);
    }
    pair = normalize_pair(std::move(pair));

    SampleRecord rec;
    rec.id = id;
    rec.rows = phantom.grid_dims[2];
    rec.cols = phantom.grid_dims[0];
    rec.img700 = to_plane(pair.img700.pixels);
    rec.img850 = to_plane(pair.img850.pixels);
    rec.gt_seg = to_plane(vessel_mask_slice(volume));
    rec.gt_so2 = to_plane(gt_so2_slice(volume));
    rec.provenance = Provenance::Simulated;
    rec.seed = pc.seed;

    json cylinders = json::array();
    for (const auto& c : volume.cylinders()) {
      cylinders.push_back({{"point_mm", {c.point_mm.x, c.point_mm.y, c.point_mm.z}},
                           {"axis", {c.axis.x, c.axis.y, c.axis.z}},
                           {"radius_mm", c.radius_mm},
                           {"so2", c.so2}});
    }
    ds.write_sample(rec, "", {{"cylinders", std::move(cylinders)}});
    ids.push_back(id);

    std::ostringstream msg;
    msg.precision(3);
    msg << "generate: " << id << " (" << (i + 1) << "/" << n_samples << ", " << volume.cylinders().size()
        << " vessels) in " << sample_clock.seconds() << " s";
    log_message(msg.str());
  }
  ds.set_split(split(ids, derive_seed(seed, kSplitTag)));
  ds.commit();
  log.write(out);
  std::ostringstream msg;
  msg.precision(4);
  msg << "generate: wrote " << n_samples << " samples to " << out.string() << " in " << total.seconds() << " s";
  log_message(msg.str());
}

void run_noise(const Options& opts) {
  opts.require_known({"dataset", "out", "snr", "seed", "overwrite"}, "noise");
  const fs::path src_dir = opts.require_string("dataset");
  const fs::path out = opts.require_string("out");
  const std::vector<double> snrs = opts.get_list("snr", {});
  const std::uint64_t seed = opts.get_u64("seed", 0);
  const bool overwrite = opts.get_bool("overwrite", false);

  ensure_dir(out);
  RunLog log("noise");
  log.add("dataset", src_dir.string());
  log.add("seed", std::to_string(seed));
  {
    std::string list;
    for (double s : snrs) list += (list.empty() ? "" : ",") + fmt(s);
    log.add("snr", list);
  }
  log.write(out);

  if (snrs.empty()) {
    log_message("noise: warning: empty SNR list, nothing to do");
    return;
  }
  const Dataset src = Dataset::open(src_dir);
  for (double snr : snrs) {
    const fs::path dst_dir = out / snr_label(snr);
    prepare_dataset_dir(dst_dir, overwrite);
    json config = src.config();
    config["noise"] = {{"snr_db", snr}, {"seed", seed}, {"source_digest", src.config_digest()}};
    Dataset dst = Dataset::create(dst_dir, src.rows(), src.cols(), config);
    for (const auto& entry : src.entries()) {
      const SampleRecord clean = src.read_sample(entry.id);
      if (clean.snr_db) {
        throw DataError(DataError::Kind::Mismatch, "sample " + clean.id + " is already noisy");
      }
      SpaPair pair;
      pair.img700 = {from_plane(clean.img700, clean.rows, clean.cols), 700.0};
      pair.img850 = {from_plane(clean.img850, clean.rows, clean.cols), 850.0};
      const Image mask = from_plane(clean.gt_seg, clean.rows, clean.cols);
      const std::uint64_t sample_seed =
          derive_seed(seed, raw_io::fnv1a64(clean.id), std::bit_cast<std::uint64_t>(snr));
      SpaPair noisy;
      try {
        noisy = add_pair_noise(pair, mask, snr, sample_seed);
      } catch (const ValidationError& e) {
        throw DataError(DataError::Kind::Mismatch, "sample " + clean.id + ": " + e.what());
      }
      SampleRecord rec = clean;
      rec.img700 = to_plane(noisy.img700.pixels);
      rec.img850 = to_plane(noisy.img850.pixels);
      rec.snr_db = snr;
      json extra = entry.extra.is_null() ? json::object() : entry.extra;
      extra["noise_seed"] = sample_seed;
      dst.write_sample(rec, entry.split, std::move(extra));
    }
    dst.commit();
    log_message("noise: wrote " + dst_dir.string());
  }
}

void run_unmix(const Options& opts) {
  opts.require_known({"dataset", "out", "mask", "mask_predictions", "split", SPA_SPECTRUM_KEYS}, "unmix");
  const fs::path ds_dir = opts.require_string("dataset");
  const fs::path out = opts.require_string("out");
  const std::string mask_source = opts.get_string("mask", "gt");
  const std::string split_name = opts.get_string("split", "all");
  if (mask_source != "gt" && mask_source != "file") throw ConfigError("mask must be 'gt' or 'file'");
  fs::path mask_dir;
  if (mask_source == "file") mask_dir = opts.require_string("mask_predictions");
  const UnmixMatrix a = UnmixMatrix::from_spectrum(spectrum_from(opts));

  const Dataset ds = Dataset::open(ds_dir);
  const auto ids = ds.ids_in_split(split_name);
  ensure_dir(out);
  RunLog log("unmix");
  log.add("dataset", ds_dir.string());
  log.add("mask", mask_source);
  if (!mask_dir.empty()) log.add("mask_predictions", mask_dir.string());
  log.add("split", split_name);
  log.add("spectrum", opts.get_string("spectrum", "built-in"));
  log.add("matrix", fmt(a(0, 0)) + "," + fmt(a(0, 1)) + "," + fmt(a(1, 0)) + "," + fmt(a(1, 1)));
  log.write(out);

  std::string report = "id,mask_pixels,invalid_pixels\n";
  std::size_t total_invalid = 0;
  for (const auto& id : ids) {
    const SampleRecord rec = ds.read_sample(id);
    const Image img700 = from_plane(rec.img700, rec.rows, rec.cols);
    const Image img850 = from_plane(rec.img850, rec.rows, rec.cols);
    const Image mask = mask_source == "gt" ? from_plane(rec.gt_seg, rec.rows, rec.cols)
                                           : binarize(read_prediction(mask_dir, id, rec.rows, rec.cols).first);
    const LuResult lu = lu_map(img700, img850, a, mask);
    write_prediction(out, id, mask, lu.so2);
    std::size_t mask_pixels = 0;
    for (double m : mask.pixels()) mask_pixels += m > 0.0;
    report += id + "," + std::to_string(mask_pixels) + "," + std::to_string(lu.invalid_pixels) + "\n";
    total_invalid += lu.invalid_pixels;
  }
  raw_io::write_file(out / "unmix_report.csv", report);
  log_message("unmix: " + std::to_string(ids.size()) + " samples, " + std::to_string(total_invalid) +
              " invalid pixels");
}

EvalReport run_eval(const Options& opts) {
  opts.require_known({"dataset", "predictions", "out", "split", "seg_loss"}, "eval");
  const fs::path ds_dir = opts.require_string("dataset");
  const fs::path pred_dir = opts.require_string("predictions");
  const fs::path out = opts.require_string("out");
  const std::string split_name = opts.get_string("split", "test");
  const std::string seg_loss = opts.get_string("seg_loss", "auto");
  seg_loss_for(seg_loss, Provenance::Simulated);

  const Dataset ds = Dataset::open(ds_dir);
  const auto ids = ds.ids_in_split(split_name);
  const auto available = list_predictions(pred_dir);
  std::vector<std::string> missing;
  for (const auto& id : ids) {
    if (!std::binary_search(available.begin(), available.end(), id)) missing.push_back(id);
  }
  if (!missing.empty()) {
    std::string msg = "predictions missing for " + std::to_string(missing.size()) + " sample(s):";
    for (const auto& id : missing) msg += " " + id;
    throw DataError(DataError::Kind::Mismatch, msg);
  }

  EvalReport report;
  for (const auto& id : ids) {
    const SampleRecord rec = ds.read_sample(id);
    const auto [seg_prob, so2] = read_prediction(pred_dir, id, rec.rows, rec.cols);
    try {
      report.samples.push_back(evaluate_sample(id, seg_prob, so2, from_plane(rec.gt_seg, rec.rows, rec.cols),
                                               from_plane(rec.gt_so2, rec.rows, rec.cols),
                                               seg_loss_for(seg_loss, rec.provenance)));
    } catch (const ValidationError& e) {
      throw DataError(DataError::Kind::Mismatch, "sample " + id + ": " + e.what());
    }
  }
  ensure_dir(out);
  raw_io::write_file(out / "eval.csv", report.to_csv());
  RunLog log("eval");
  log.add("dataset", ds_dir.string());
  log.add("predictions", pred_dir.string());
  log.add("split", split_name);
  log.add("seg_loss", seg_loss);
  log.write(out);

  std::ostringstream msg;
  msg.precision(4);
  msg << "eval: " << report.samples.size() << " samples, so2 MSE " << report.so2_mse().mean << " +- "
      << report.so2_mse().stddev << ", accuracy " << report.accuracy().mean;
  log_message(msg.str());
  return report;
}

void run_export(const Options& opts) {
  opts.require_known({"dataset", "out", "format", "split", "predictions"}, "export");
  const fs::path ds_dir = opts.require_string("dataset");
  const fs::path out = opts.require_string("out");
  const std::string format = opts.get_string("format", "pgm,csv");
  const std::string split_name = opts.get_string("split", "all");
  bool want_pgm = false, want_f32 = false, want_csv = false;
  {
    std::istringstream in(format);
    for (std::string item; std::getline(in, item, ',');) {
      if (item == "pgm") want_pgm = true;
      else if (item == "f32") want_f32 = true;
      else if (item == "csv") want_csv = true;
      else if (item == "all") want_pgm = want_f32 = want_csv = true;
      else throw ConfigError("format: unknown item '" + item + "' (expected pgm, csv, f32 or all)");
    }
    if (!want_pgm && !want_f32 && !want_csv) throw ConfigError("format: nothing selected");
  }
  const auto pred_dir = opts.find("predictions");

  const Dataset ds = Dataset::open(ds_dir);
  ensure_dir(out);
  RunLog log("export");
  log.add("dataset", ds_dir.string());
  log.add("format", format);
  log.add("split", split_name);
  if (pred_dir) log.add("predictions", *pred_dir);
  log.write(out);

  auto emit = [&](const std::string& stem, const Image& img) {
    if (want_pgm) write_pgm(out / (stem + ".pgm"), img);
    if (want_csv) write_csv(out / (stem + ".csv"), img);
    if (want_f32) write_f32(out / (stem + ".f32"), img);
  };
  const auto ids = ds.ids_in_split(split_name);
  for (const auto& id : ids) {
    const SampleRecord rec = ds.read_sample(id);
    emit(id + "_img700", from_plane(rec.img700, rec.rows, rec.cols));
    emit(id + "_img850", from_plane(rec.img850, rec.rows, rec.cols));
    emit(id + "_gt_seg", from_plane(rec.gt_seg, rec.rows, rec.cols));
    emit(id + "_gt_so2", from_plane(rec.gt_so2, rec.rows, rec.cols));
    if (pred_dir) {
      const auto [seg_prob, so2] = read_prediction(*pred_dir, id, rec.rows, rec.cols);
      const Image seg_bin = binarize(seg_prob);
      emit(id + "_pred_seg", seg_bin);
      emit(id + "_pred_so2", final_so2(seg_bin, so2));
    }
  }
  log_message("export: " + std::to_string(ids.size()) + " samples to " + out.string());
}

void run_augment(const Options& opts) {
  opts.require_known({"dataset", "out", "seed", "copies", "max_angle_deg", "max_shift_px", "flip_probability",
                      "split", "overwrite"},
                     "augment");
  const fs::path src_dir = opts.require_string("dataset");
  const fs::path out = opts.require_string("out");
  const std::uint64_t seed = opts.get_u64("seed", 0);
  const std::string split_name = opts.get_string("split", "train");
  AugmentConfig cfg;
  cfg.n_copies = static_cast<int>(opts.get_int("copies", cfg.n_copies));
  cfg.max_angle_deg = opts.get_double("max_angle_deg", cfg.max_angle_deg);
  cfg.max_shift_px = static_cast<int>(opts.get_int("max_shift_px", cfg.max_shift_px));
  cfg.flip_probability = opts.get_double("flip_probability", cfg.flip_probability);

  const Dataset src = Dataset::open(src_dir);
  prepare_dataset_dir(out, opts.get_bool("overwrite", false));
  json config = src.config();
  config["augment"] = {{"seed", seed},
                       {"copies", cfg.n_copies},
                       {"max_angle_deg", cfg.max_angle_deg},
                       {"max_shift_px", cfg.max_shift_px},
                       {"flip_probability", cfg.flip_probability},
                       {"split", split_name}};
  Dataset dst = Dataset::create(out, src.rows(), src.cols(), config);
  const auto target_ids = src.ids_in_split(split_name);
  const std::unordered_set<std::string> targets(target_ids.begin(), target_ids.end());
  std::size_t added = 0;
  for (const auto& entry : src.entries()) {
    const SampleRecord rec = src.read_sample(entry.id);
    dst.write_sample(rec, entry.split, entry.extra);
    if (!targets.contains(entry.id)) continue;
    const std::uint64_t sample_seed = derive_seed(seed, raw_io::fnv1a64(entry.id));
    for (auto& aug : augment(rec, cfg, sample_seed)) {
      json extra = {{"source", entry.id},
                    {"augment_seed", sample_seed},
                    {"angle_deg", aug.params.angle_deg},
                    {"shift_rows", aug.params.shift_rows},
                    {"shift_cols", aug.params.shift_cols},
                    {"flip", aug.params.flip}};
      dst.write_sample(aug.record, entry.split, std::move(extra));
      ++added;
    }
  }
  dst.commit();
  RunLog log("augment");
  log.add("dataset", src_dir.string());
  log.add("seed", std::to_string(seed));
  log.add("copies", std::to_string(cfg.n_copies));
  log.add("max_angle_deg", cfg.max_angle_deg);
  log.add("max_shift_px", std::to_string(cfg.max_shift_px));
  log.add("flip_probability", cfg.flip_probability);
  log.add("split", split_name);
  log.write(out);
  log_message("augment: " + std::to_string(targets.size()) + " originals, " + std::to_string(added) +
              " augmented copies");
}

}  // namespace spa::commands
