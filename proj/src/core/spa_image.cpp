#include "spa_image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "error.hpp"
#include "raw_io.hpp"
#include "rng.hpp"

namespace spa {

namespace {
constexpr std::uint64_t kNoiseStreamTag = 0x6e6f'6973'6500'0000ull;
}

Image central_slice(const Grid3<double>& grid) {
  const int y = grid.ny() / 2;
  Image img(grid.nz(), grid.nx());
  for (int z = 0; z < grid.nz(); ++z) {
    for (int x = 0; x < grid.nx(); ++x) img(z, x) = grid(x, y, z);
  }
  return img;
}

Image mask_top_rows(Image img, int n_rows) {
  if (n_rows < 0) throw ValidationError("mask_top_rows: n_rows must be non-negative");
  const int rows = std::min(n_rows, img.rows());
  std::fill_n(img.pixels().begin(), static_cast<std::size_t>(rows) * img.cols(), 0.0);
  return img;
}

double vessel_signal_power(const Image& img, const Image& vessel_mask) {
  require_same_shape(img, vessel_mask, "vessel_signal_power");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (vessel_mask[i] > 0.0) {
      sum += img[i] * img[i];
      ++count;
    }
  }
  if (count == 0) throw ValidationError("SNR undefined: vessel mask is empty");
  return sum / static_cast<double>(count);
}

double noise_variance_for_snr(const Image& img, const Image& vessel_mask, double target_snr_db) {
  if (!std::isfinite(target_snr_db)) throw ValidationError("target SNR must be finite");
  const double power = vessel_signal_power(img, vessel_mask);
  if (!(power > 0.0)) throw ValidationError("SNR undefined: vessel signal power is zero");
  return power * std::pow(10.0, -target_snr_db / 10.0);
}

Image add_noise(const Image& img, const Image& vessel_mask, double target_snr_db, std::uint64_t seed) {
  const double sigma = std::sqrt(noise_variance_for_snr(img, vessel_mask, target_snr_db));
  CounterRng rng(seed, kNoiseStreamTag);
  Image out = img;
  for (double& p : out.pixels()) p += sigma * rng.normal();
  return out;
}

SpaPair normalize_pair(SpaPair pair) {
  require_same_shape(pair.img700.pixels, pair.img850.pixels, "normalize_pair");
  double peak = 0.0;
  for (double p : pair.img700.pixels.pixels()) peak = std::max(peak, p);
  for (double p : pair.img850.pixels.pixels()) peak = std::max(peak, p);
  if (!(peak > 0.0)) throw ValidationError("normalize_pair: both images are zero");
  for (double& p : pair.img700.pixels.pixels()) p /= peak;
  for (double& p : pair.img850.pixels.pixels()) p /= peak;
  return pair;
}

SpaPair add_pair_noise(const SpaPair& clean, const Image& vessel_mask, double target_snr_db, std::uint64_t seed) {
  SpaPair noisy = clean;
  noisy.img700.pixels = add_noise(clean.img700.pixels, vessel_mask, target_snr_db, derive_seed(seed, 700));
  noisy.img850.pixels = add_noise(clean.img850.pixels, vessel_mask, target_snr_db, derive_seed(seed, 850));
  noisy.snr_db = target_snr_db;
  noisy.seed = seed;
  return noisy;
}

void write_pgm(const std::filesystem::path& path, const Image& img) {
  const auto [lo_it, hi_it] = std::minmax_element(img.pixels().begin(), img.pixels().end());
  const double lo = img.size() ? *lo_it : 0.0;
  const double range = img.size() ? *hi_it - lo : 0.0;
  std::string bytes =
      "P5\n" + std::to_string(img.cols()) + " " + std::to_string(img.rows()) + "\n255\n";
  bytes.reserve(bytes.size() + img.size());
  for (double p : img.pixels()) {
    const double t = range > 0.0 ? (p - lo) / range : 0.0;
    bytes.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(t * 255.0))));
  }
  raw_io::write_file(path, bytes);
}

void write_f32(const std::filesystem::path& path, const Image& img) {
  std::vector<float> values(img.pixels().begin(), img.pixels().end());
  std::string bytes;
  raw_io::append_f32_le(bytes, values);
  raw_io::write_file(path, bytes);
}

void write_csv(const std::filesystem::path& path, const Image& img) {
  std::string text;
  char buf[32];
  for (int r = 0; r < img.rows(); ++r) {
    for (int c = 0; c < img.cols(); ++c) {
      // %.9g round-trips a float32 value.
      std::snprintf(buf, sizeof buf, c == 0 ? "%.9g" : ",%.9g", static_cast<double>(static_cast<float>(img(r, c))));
      text += buf;
    }
    text += '\n';
  }
  raw_io::write_file(path, text);
}

}  // namespace spa
