#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "grid.hpp"
#include "mc_transport.hpp"

namespace spa {

inline constexpr int kSpaImageSize = 128;
inline constexpr int kDefaultMaskedRows = 50;

/// One sPA image: pixels plus the wavelength it was acquired at.
struct SpaImage {
  Image pixels;
  double wavelength_nm = 0.0;
};

struct SpaPair {
  SpaImage img700;
  SpaImage img850;
  /// Unset for clean (noise-free) pairs.
  std::optional<double> snr_db;
  std::uint64_t seed = 0;
};

/// x-z plane at y = floor(ny / 2); rows index depth, columns index x.
Image central_slice(const Grid3<double>& grid);
inline Image central_slice(const AbsorbedEnergyMap& map) { return central_slice(map.grid); }

/// Rows [0, n_rows) set to zero, everything else untouched.
Image mask_top_rows(Image img, int n_rows = kDefaultMaskedRows);

/// Mean of pixel^2 over the positive pixels of `vessel_mask`.
double vessel_signal_power(const Image& img, const Image& vessel_mask);

/// Variance that puts `img` at `target_snr_db` relative to its vessel power.
/// Throws ValidationError when that power is zero.
double noise_variance_for_snr(const Image& img, const Image& vessel_mask, double target_snr_db);

/// Adds zero-mean white Gaussian noise to every pixel with variance
/// P * 10^(-snr/10), P = vessel_signal_power. Negative results are kept.
/// Throws ValidationError when the mask is empty.
Image add_noise(const Image& img, const Image& vessel_mask, double target_snr_db, std::uint64_t seed);

/// Divides both images by their joint maximum so the 700/850 ratio survives.
/// Throws ValidationError for an all-zero pair.
SpaPair normalize_pair(SpaPair pair);

/// Independent noise for each wavelength, seeds derived from `seed`.
SpaPair add_pair_noise(const SpaPair& clean, const Image& vessel_mask, double target_snr_db, std::uint64_t seed);

/// 8-bit binary PGM (P5), min-max scaled; for viewing only.
void write_pgm(const std::filesystem::path& path, const Image& img);
/// Raw little-endian float32, row-major.
void write_f32(const std::filesystem::path& path, const Image& img);
/// Comma-separated text, one image row per line.
void write_csv(const std::filesystem::path& path, const Image& img);

}  // namespace spa
