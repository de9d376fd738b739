#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "grid.hpp"

namespace spa {

inline constexpr int kDatasetFormatVersion = 1;
inline constexpr std::string_view kManifestName = "manifest.json";
inline constexpr std::string_view kSampleExtension = ".f32x4";
inline constexpr std::string_view kPredictionExtension = ".f32x2";

enum class Provenance { Simulated, ExperimentalImport };

std::string_view to_string(Provenance p) noexcept;
Provenance parse_provenance(std::string_view text);

/// One sample: two sPA images plus ground truth, stored as float32 planes in
/// row-major order.
struct SampleRecord {
  std::string id;
  int rows = 128;
  int cols = 128;
  std::vector<float> img700;
  std::vector<float> img850;
  std::vector<float> gt_seg;
  std::vector<float> gt_so2;
  std::optional<double> snr_db;
  Provenance provenance = Provenance::Simulated;
  std::uint64_t seed = 0;

  /// Shapes agree, gt_seg is binary, gt_so2 is in [0, 1] and zero off the
  /// vessel mask. Throws ValidationError.
  void validate() const;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

std::vector<float> to_plane(const Image& img);
Image from_plane(const std::vector<float>& plane, int rows, int cols);

/// Ids double as file names, so only [A-Za-z0-9_.-] is accepted.
void validate_sample_id(std::string_view id);

struct SplitAssignment {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
};

/// Sorts the ids, shuffles them with `seed`, then takes 80% train, 10% val
/// and the remainder as test (counts floor(0.8 n), floor(0.1 n)).
SplitAssignment split(std::vector<std::string> ids, std::uint64_t seed);

struct AugmentParams {
  double angle_deg = 0.0;
  int shift_rows = 0;
  int shift_cols = 0;
  bool flip = false;
};

struct AugmentConfig {
  int n_copies = 4;
  double max_angle_deg = 15.0;
  int max_shift_px = 10;
  double flip_probability = 0.5;
};

/// Rotation about the image center (nearest neighbour, zero fill), then a
/// horizontal flip, then an integer shift (zero fill). The same mapping is
/// applied to all four planes; gt_seg is re-binarized afterwards.
SampleRecord apply_transform(const SampleRecord& record, const AugmentParams& params);

AugmentParams draw_augment_params(const AugmentConfig& config, std::uint64_t seed, int copy_index);

struct AugmentedRecord {
  SampleRecord record;
  AugmentParams params;
};

/// `config.n_copies` transformed copies (the original is not included). Copy k
/// gets id "<id>_aug<k>" and parameters from draw_augment_params(seed, k).
std::vector<AugmentedRecord> augment(const SampleRecord& record, const AugmentConfig& config, std::uint64_t seed);

std::string encode_sample_blob(const SampleRecord& record);

struct ManifestEntry {
  std::string id;
  std::string file;
  std::uint64_t bytes = 0;
  std::uint32_t crc32 = 0;
  std::optional<double> snr_db;
  Provenance provenance = Provenance::Simulated;
  std::uint64_t seed = 0;
  std::string split;
  /// Extra per-sample metadata (e.g. augmentation parameters); null if none.
  nlohmann::json extra;
};

/// Directory store: `manifest.json` plus `samples/<id>.f32x4` blobs holding
/// img700, img850, gt_seg, gt_so2 as little-endian float32.
class Dataset {
 public:
  /// Starts a new store in `dir` (created if needed). Nothing is persisted
  /// until commit().
  static Dataset create(const std::filesystem::path& dir, int rows, int cols, nlohmann::json config);
  /// Loads and checks the manifest. DataError(Version) for other versions.
  static Dataset open(const std::filesystem::path& dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  const nlohmann::json& config() const noexcept { return config_; }
  std::string config_digest() const;
  const std::vector<ManifestEntry>& entries() const noexcept { return entries_; }
  const ManifestEntry& entry(std::string_view id) const;
  bool contains(std::string_view id) const noexcept;

  /// Writes the blob immediately and records it in the in-memory manifest.
  void write_sample(const SampleRecord& record, std::string split = {}, nlohmann::json extra = nullptr);

  /// DataError(MissingEntry | Truncated | Checksum) on the respective faults.
  SampleRecord read_sample(std::string_view id) const;

  void set_split(const SplitAssignment& assignment);
  /// Ids whose split is `name`, or every id for "all".
  std::vector<std::string> ids_in_split(std::string_view name) const;

  void commit() const;

 private:
  Dataset(std::filesystem::path dir, int rows, int cols, nlohmann::json config)
      : dir_(std::move(dir)), rows_(rows), cols_(cols), config_(std::move(config)) {}

  std::filesystem::path dir_;
  int rows_;
  int cols_;
  nlohmann::json config_;
  std::vector<ManifestEntry> entries_;
};

/// Prediction blob `<dir>/pred/<id>.f32x2`: seg_prob then so2_intermediate.
void write_prediction(const std::filesystem::path& dir, std::string_view id, const Image& seg_prob,
                      const Image& so2_intermediate);
std::pair<Image, Image> read_prediction(const std::filesystem::path& dir, std::string_view id, int rows, int cols);
/// Sorted ids of every prediction blob under `<dir>/pred`.
std::vector<std::string> list_predictions(const std::filesystem::path& dir);

}  // namespace spa
