#include "dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <unordered_set>

#include "error.hpp"
#include "raw_io.hpp"
#include "rng.hpp"

namespace spa {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kSplitStreamTag = 0x7370'6c69'7400'0000ull;
constexpr std::uint64_t kAugmentStreamTag = 0x6175'676d'656e'7400ull;

std::string hex32(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

std::uint32_t parse_hex32(const std::string& s) {
  if (s.size() != 8 || s.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos) {
    throw DataError(DataError::Kind::Parse, "manifest: malformed crc32 '" + s + "'");
  }
  return static_cast<std::uint32_t>(std::stoul(s, nullptr, 16));
}

std::vector<float> sample_plane(const std::vector<float>& src, int rows, int cols, const AugmentParams& p) {
  const double theta = p.angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double cr = 0.5 * (rows - 1);
  const double cc = 0.5 * (cols - 1);
  std::vector<float> out(src.size(), 0.0f);
  for (int r = 0; r < rows; ++r) {
    for (int col = 0; col < cols; ++col) {
      // Invert shift, then flip, then rotation.
      const int r1 = r - p.shift_rows;
      int c1 = col - p.shift_cols;
      if (r1 < 0 || r1 >= rows || c1 < 0 || c1 >= cols) continue;
      if (p.flip) c1 = cols - 1 - c1;
      const double dr = r1 - cr;
      const double dc = c1 - cc;
      const auto sr = static_cast<int>(std::lround(cr + c * dr + s * dc));
      const auto sc = static_cast<int>(std::lround(cc - s * dr + c * dc));
      if (sr < 0 || sr >= rows || sc < 0 || sc >= cols) continue;
      out[static_cast<std::size_t>(r) * cols + col] = src[static_cast<std::size_t>(sr) * cols + sc];
    }
  }
  return out;
}

json snr_to_json(const std::optional<double>& snr) { return snr ? json(*snr) : json("clean"); }

std::optional<double> snr_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "clean") return std::nullopt;
  if (j.is_number()) return j.get<double>();
  throw DataError(DataError::Kind::Parse, "manifest: snr_db must be a number or \"clean\"");
}

}  // namespace

std::string_view to_string(Provenance p) noexcept {
  return p == Provenance::Simulated ? "simulated" : "experimental-import";
}

Provenance parse_provenance(std::string_view text) {
  if (text == "simulated") return Provenance::Simulated;
  if (text == "experimental-import") return Provenance::ExperimentalImport;
  throw DataError(DataError::Kind::Parse, "unknown provenance '" + std::string(text) + "'");
}

void SampleRecord::validate() const {
  validate_sample_id(id);
  if (rows <= 0 || cols <= 0) throw ValidationError("sample " + id + ": non-positive dimensions");
  const auto n = static_cast<std::size_t>(rows) * cols;
  if (img700.size() != n || img850.size() != n || gt_seg.size() != n || gt_so2.size() != n) {
    throw ValidationError("sample " + id + ": array sizes do not match " + std::to_string(rows) + "x" +
                          std::to_string(cols));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (gt_seg[i] != 0.0f && gt_seg[i] != 1.0f) throw ValidationError("sample " + id + ": gt_seg is not binary");
    if (!(gt_so2[i] >= 0.0f && gt_so2[i] <= 1.0f)) throw ValidationError("sample " + id + ": gt_so2 outside [0, 1]");
    if (gt_so2[i] != 0.0f && gt_seg[i] == 0.0f) {
      throw ValidationError("sample " + id + ": gt_so2 nonzero outside the vessel mask");
    }
  }
}

std::vector<float> to_plane(const Image& img) { return {img.pixels().begin(), img.pixels().end()}; }

Image from_plane(const std::vector<float>& plane, int rows, int cols) {
  Image img(rows, cols);
  if (plane.size() != img.size()) throw ValidationError("plane size does not match image dimensions");
  std::copy(plane.begin(), plane.end(), img.pixels().begin());
  return img;
}

void validate_sample_id(std::string_view id) {
  const bool ok = !id.empty() && id != "." && id != ".." && std::all_of(id.begin(), id.end(), [](char ch) {
    return (ch >= 'A' && ch <= 'Z') || (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '_' ||
           ch == '-' || ch == '.';
  });
  if (!ok) throw ValidationError("invalid sample id '" + std::string(id) + "'");
}

SplitAssignment split(std::vector<std::string> ids, std::uint64_t seed) {
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw ValidationError("split: duplicate sample ids");
  }
  CounterRng rng(seed, kSplitStreamTag);
  for (std::size_t i = ids.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i - 1)));
    std::swap(ids[i - 1], ids[j]);
  }
  const std::size_t n = ids.size();
  const std::size_t n_train = n * 8 / 10;
  const std::size_t n_val = n / 10;
  SplitAssignment out;
  out.train.assign(ids.begin(), ids.begin() + n_train);
  out.val.assign(ids.begin() + n_train, ids.begin() + n_train + n_val);
  out.test.assign(ids.begin() + n_train + n_val, ids.end());
  return out;
}

SampleRecord apply_transform(const SampleRecord& record, const AugmentParams& params) {
  SampleRecord out = record;
  out.img700 = sample_plane(record.img700, record.rows, record.cols, params);
  out.img850 = sample_plane(record.img850, record.rows, record.cols, params);
  out.gt_seg = sample_plane(record.gt_seg, record.rows, record.cols, params);
  out.gt_so2 = sample_plane(record.gt_so2, record.rows, record.cols, params);
  for (float& v : out.gt_seg) v = v > 0.5f ? 1.0f : 0.0f;
  return out;
}

AugmentParams draw_augment_params(const AugmentConfig& config, std::uint64_t seed, int copy_index) {
  CounterRng rng(derive_seed(seed, kAugmentStreamTag), static_cast<std::uint64_t>(copy_index));
  AugmentParams p;
  p.angle_deg = config.max_angle_deg * (2.0 * rng.uniform() - 1.0);
  p.shift_rows = static_cast<int>(rng.uniform_int(-config.max_shift_px, config.max_shift_px));
  p.shift_cols = static_cast<int>(rng.uniform_int(-config.max_shift_px, config.max_shift_px));
  p.flip = rng.uniform() < config.flip_probability;
  return p;
}

std::vector<AugmentedRecord> augment(const SampleRecord& record, const AugmentConfig& config, std::uint64_t seed) {
  if (config.n_copies < 0 || config.max_shift_px < 0 || !(config.max_angle_deg >= 0.0) ||
      !(config.flip_probability >= 0.0 && config.flip_probability <= 1.0)) {
    throw ConfigError("invalid augmentation config");
  }
  record.validate();
  std::vector<AugmentedRecord> out;
  for (int k = 0; k < config.n_copies; ++k) {
    AugmentParams params = draw_augment_params(config, seed, k);
    SampleRecord copy = apply_transform(record, params);
    copy.id = record.id + "_aug" + std::to_string(k);
    copy.seed = derive_seed(seed, kAugmentStreamTag, static_cast<std::uint64_t>(k));
    out.push_back({std::move(copy), params});
  }
  return out;
}

std::string encode_sample_blob(const SampleRecord& record) {
  std::string bytes;
  bytes.reserve(record.img700.size() * 16);
  raw_io::append_f32_le(bytes, record.img700);
  raw_io::append_f32_le(bytes, record.img850);
  raw_io::append_f32_le(bytes, record.gt_seg);
  raw_io::append_f32_le(bytes, record.gt_so2);
  return bytes;
}

Dataset Dataset::create(const fs::path& dir, int rows, int cols, json config) {
  if (rows <= 0 || cols <= 0) throw ConfigError("dataset dimensions must be positive");
  std::error_code ec;
  fs::create_directories(dir / "samples", ec);
  if (ec) throw DataError(DataError::Kind::Io, "cannot create dataset directory " + dir.string() + ": " + ec.message());
  return Dataset(dir, rows, cols, std::move(config));
}

Dataset Dataset::open(const fs::path& dir) {
  const fs::path manifest_path = dir / kManifestName;
  if (!fs::exists(manifest_path)) {
    throw DataError(DataError::Kind::MissingEntry, "no manifest at " + manifest_path.string());
  }
  json m;
  try {
    m = json::parse(raw_io::read_file(manifest_path));
  } catch (const json::exception& e) {
    throw DataError(DataError::Kind::Parse, manifest_path.string() + ": " + e.what());
  }
  try {
    const int version = m.at("format_version").get<int>();
    if (version != kDatasetFormatVersion) {
      throw DataError(DataError::Kind::Version, manifest_path.string() + ": format_version " + std::to_string(version) +
                                                    " (expected " + std::to_string(kDatasetFormatVersion) + ")");
    }
    Dataset ds(dir, m.at("image_rows").get<int>(), m.at("image_cols").get<int>(), m.value("config", json::object()));
    for (const auto& s : m.at("samples")) {
      ManifestEntry e;
      e.id = s.at("id").get<std::string>();
      validate_sample_id(e.id);
      e.file = s.at("file").get<std::string>();
      e.bytes = s.at("bytes").get<std::uint64_t>();
      e.crc32 = parse_hex32(s.at("crc32").get<std::string>());
      e.snr_db = snr_from_json(s.at("snr_db"));
      e.provenance = parse_provenance(s.at("provenance").get<std::string>());
      e.seed = s.at("seed").get<std::uint64_t>();
      e.split = s.value("split", "");
      e.extra = s.value("extra", json());
      ds.entries_.push_back(std::move(e));
    }
    return ds;
  } catch (const json::exception& e) {
    throw DataError(DataError::Kind::Parse, manifest_path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw DataError(DataError::Kind::Parse, manifest_path.string() + ": " + e.what());
  }
}

std::string Dataset::config_digest() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(raw_io::fnv1a64(config_.dump())));
  return std::string("fnv1a64:") + buf;
}

const ManifestEntry& Dataset::entry(std::string_view id) const {
  auto it = std::find_if(entries_.begin(), entries_.end(), [id](const ManifestEntry& e) { return e.id == id; });
  if (it == entries_.end()) {
    throw DataError(DataError::Kind::MissingEntry, "sample '" + std::string(id) + "' not in manifest");
  }
  return *it;
}

bool Dataset::contains(std::string_view id) const noexcept {
  return std::any_of(entries_.begin(), entries_.end(), [id](const ManifestEntry& e) { return e.id == id; });
}

void Dataset::write_sample(const SampleRecord& record, std::string split_name, json extra) {
  record.validate();
  if (record.rows != rows_ || record.cols != cols_) {
    throw ValidationError("sample " + record.id + " is " + std::to_string(record.rows) + "x" +
                          std::to_string(record.cols) + ", dataset expects " + std::to_string(rows_) + "x" +
                          std::to_string(cols_));
  }
  if (contains(record.id)) throw ValidationError("duplicate sample id '" + record.id + "'");
  const std::string bytes = encode_sample_blob(record);
  ManifestEntry e;
  e.id = record.id;
  e.file = "samples/" + record.id + std::string(kSampleExtension);
  e.bytes = bytes.size();
  e.crc32 = raw_io::crc32(bytes);
  e.snr_db = record.snr_db;
  e.provenance = record.provenance;
  e.seed = record.seed;
  e.split = std::move(split_name);
  e.extra = std::move(extra);
  raw_io::write_file(dir_ / e.file, bytes);
  entries_.push_back(std::move(e));
}

SampleRecord Dataset::read_sample(std::string_view id) const {
  const ManifestEntry& e = entry(id);
  const fs::path path = dir_ / e.file;
  if (!fs::exists(path)) {
    throw DataError(DataError::Kind::MissingEntry, "sample '" + e.id + "': blob " + path.string() + " is missing");
  }
  const std::string bytes = raw_io::read_file(path);
  const auto plane = static_cast<std::size_t>(rows_) * cols_;
  if (bytes.size() != e.bytes || bytes.size() != plane * 16) {
    throw DataError(DataError::Kind::Truncated, "sample '" + e.id + "': blob has " + std::to_string(bytes.size()) +
                                                    " bytes, expected " + std::to_string(plane * 16));
  }
  if (raw_io::crc32(bytes) != e.crc32) {
    throw DataError(DataError::Kind::Checksum, "sample '" + e.id + "': crc32 mismatch");
  }
  SampleRecord r;
  r.id = e.id;
  r.rows = rows_;
  r.cols = cols_;
  for (auto* dst : {&r.img700, &r.img850, &r.gt_seg, &r.gt_so2}) dst->resize(plane);
  raw_io::read_f32_le(bytes.data(), r.img700);
  raw_io::read_f32_le(bytes.data() + plane * 4, r.img850);
  raw_io::read_f32_le(bytes.data() + plane * 8, r.gt_seg);
  raw_io::read_f32_le(bytes.data() + plane * 12, r.gt_so2);
  r.snr_db = e.snr_db;
  r.provenance = e.provenance;
  r.seed = e.seed;
  return r;
}

void Dataset::set_split(const SplitAssignment& assignment) {
  for (auto& e : entries_) e.split.clear();
  auto assign = [this](const std::vector<std::string>& ids, const char* name) {
    for (const auto& id : ids) {
      auto it = std::find_if(entries_.begin(), entries_.end(), [&](const ManifestEntry& e) { return e.id == id; });
      if (it == entries_.end()) throw DataError(DataError::Kind::MissingEntry, "split references unknown id " + id);
      if (!it->split.empty()) throw ValidationError("sample " + id + " assigned to two splits");
      it->split = name;
    }
  };
  assign(assignment.train, "train");
  assign(assignment.val, "val");
  assign(assignment.test, "test");
}

std::vector<std::string> Dataset::ids_in_split(std::string_view name) const {
  if (name != "all" && name != "train" && name != "val" && name != "test") {
    throw ConfigError("unknown split '" + std::string(name) + "'");
  }
  std::vector<std::string> ids;
  for (const auto& e : entries_) {
    if (name == "all" || e.split == name) ids.push_back(e.id);
  }
  return ids;
}

void Dataset::commit() const {
  json samples = json::array();
  for (const auto& e : entries_) {
    json s = {{"id", e.id},
              {"file", e.file},
              {"bytes", e.bytes},
              {"crc32", hex32(e.crc32)},
              {"snr_db", snr_to_json(e.snr_db)},
              {"provenance", std::string(to_string(e.provenance))},
              {"seed", e.seed},
              {"split", e.split}};
    if (!e.extra.is_null()) s["extra"] = e.extra;
    samples.push_back(std::move(s));
  }
  const json m = {{"format_version", kDatasetFormatVersion},
                  {"image_rows", rows_},
                  {"image_cols", cols_},
                  {"fields", {"img700", "img850", "gt_seg", "gt_so2"}},
                  {"config", config_},
                  {"config_digest", config_digest()},
                  {"samples", std::move(samples)}};
  const fs::path tmp = dir_ / (std::string(kManifestName) + ".tmp");
  raw_io::write_file(tmp, m.dump(2) + "\n");
  std::error_code ec;
  fs::rename(tmp, dir_ / kManifestName, ec);
  if (ec) throw DataError(DataError::Kind::Io, "cannot commit manifest in " + dir_.string() + ": " + ec.message());
}

void write_prediction(const fs::path& dir, std::string_view id, const Image& seg_prob, const Image& so2_intermediate) {
  validate_sample_id(id);
  require_same_shape(seg_prob, so2_intermediate, "write_prediction");
  std::error_code ec;
  fs::create_directories(dir / "pred", ec);
  if (ec) throw DataError(DataError::Kind::Io, "cannot create " + (dir / "pred").string() + ": " + ec.message());
  std::string bytes;
  raw_io::append_f32_le(bytes, to_plane(seg_prob));
  raw_io::append_f32_le(bytes, to_plane(so2_intermediate));
  raw_io::write_file(dir / "pred" / (std::string(id) + std::string(kPredictionExtension)), bytes);
}

std::pair<Image, Image> read_prediction(const fs::path& dir, std::string_view id, int rows, int cols) {
  const fs::path path = dir / "pred" / (std::string(id) + std::string(kPredictionExtension));
  if (!fs::exists(path)) {
    throw DataError(DataError::Kind::MissingEntry, "no prediction for '" + std::string(id) + "' at " + path.string());
  }
  const std::string bytes = raw_io::read_file(path);
  const auto plane = static_cast<std::size_t>(rows) * cols;
  if (bytes.size() != plane * 8) {
    throw DataError(DataError::Kind::Truncated, path.string() + ": " + std::to_string(bytes.size()) +
                                                    " bytes, expected " + std::to_string(plane * 8));
  }
  std::vector<float> seg(plane), so2(plane);
  raw_io::read_f32_le(bytes.data(), seg);
  raw_io::read_f32_le(bytes.data() + plane * 4, so2);
  return {from_plane(seg, rows, cols), from_plane(so2, rows, cols)};
}

std::vector<std::string> list_predictions(const fs::path& dir) {
  std::vector<std::string> ids;
  const fs::path pred = dir / "pred";
  if (!fs::is_directory(pred)) {
    throw DataError(DataError::Kind::MissingEntry, "no prediction directory at " + pred.string());
  }
  for (const auto& item : fs::directory_iterator(pred)) {
    if (item.is_regular_file() && item.path().extension() == kPredictionExtension) {
      ids.push_back(item.path().stem().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace spa
