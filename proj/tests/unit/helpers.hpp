#pragma once

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>

#include "grid.hpp"

namespace spa::test {

/// Fresh directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("spa_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  std::filesystem::path path_;
};

inline Image random_mask(int rows, int cols, std::mt19937_64& gen, double p = 0.5) {
  std::bernoulli_distribution coin(p);
  Image img(rows, cols);
  for (auto& v : img.pixels()) v = coin(gen) ? 1.0 : 0.0;
  return img;
}

inline Image random_image(int rows, int cols, std::mt19937_64& gen, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Image img(rows, cols);
  for (auto& v : img.pixels()) v = u(gen);
  return img;
}

/// Pixel copy, safe to iterate when `img` is a temporary.
inline std::vector<double> px(Image img) { return std::move(img.pixels()); }

inline double sum(const Image& img) {
  double s = 0;
  for (double v : img.pixels()) s += v;
  return s;
}

}  // namespace spa::test
