#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "error.hpp"
#include "helpers.hpp"
#include "raw_io.hpp"
#include "spa_image.hpp"

using namespace spa;

namespace {

Image disk_mask(int n, double cr, double cc, double r) {
  Image m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = std::hypot(i - cr, j - cc) <= r ? 1.0 : 0.0;
  return m;
}

// SNR as re-measured on a noisy image: vessel power over the empirical noise
// variance of (noisy - clean).
double measured_snr_db(const Image& clean, const Image& noisy, const Image& mask) {
  double var = 0;
  for (std::size_t i = 0; i < clean.size(); ++i) var += (noisy[i] - clean[i]) * (noisy[i] - clean[i]);
  var /= static_cast<double>(clean.size());
  return 10.0 * std::log10(vessel_signal_power(clean, mask) / var);
}

}  // namespace

TEST_CASE("central_slice picks y = ny / 2") {
  Grid3<double> g(8, 128, 6);
  g(3, 64, 2) = 5.0;
  g(3, 63, 2) = 7.0;  // neighbouring plane must not leak in
  const Image img = central_slice(g);
  CHECK(img.rows() == 6);
  CHECK(img.cols() == 8);
  for (int r = 0; r < img.rows(); ++r)
    for (int c = 0; c < img.cols(); ++c) CHECK(img(r, c) == (r == 2 && c == 3 ? 5.0 : 0.0));

  Grid3<double> odd(4, 5, 4, 2.5);
  for (double v : test::px(central_slice(odd))) CHECK(v == 2.5);
}

TEST_CASE("mask_top_rows") {
  std::mt19937_64 gen(1);
  const Image img = test::random_image(128, 128, gen, 0.1, 1.0);
  CHECK(mask_top_rows(img, 0) == img);
  for (double v : test::px(mask_top_rows(img, 128))) CHECK(v == 0.0);
  for (double v : test::px(mask_top_rows(img, 500))) CHECK(v == 0.0);
  const Image m = mask_top_rows(img, 50);
  for (int r = 0; r < 128; ++r)
    for (int c = 0; c < 128; ++c) {
      if (r < 50) {
        REQUIRE(m(r, c) == 0.0);
      } else {
        REQUIRE(m(r, c) == img(r, c));
      }
    }
  CHECK_THROWS_AS(mask_top_rows(img, -1), ValidationError);
}

TEST_CASE("noise variance from the SNR definition") {
  Image ones(4, 4, 1.0);
  Image mask(4, 4, 1.0);
  CHECK(noise_variance_for_snr(ones, mask, 20.0) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(noise_variance_for_snr(ones, mask, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  // power is measured on the vessel pixels only
  Image img(2, 2);
  img(0, 0) = 2.0;
  img(1, 1) = 100.0;
  Image m(2, 2);
  m(0, 0) = 1.0;
  CHECK(vessel_signal_power(img, m) == 4.0);
  CHECK_THROWS_AS(vessel_signal_power(img, Image(2, 2)), ValidationError);
  CHECK_THROWS_AS(vessel_signal_power(img, Image(3, 2, 1.0)), ValidationError);
}

TEST_CASE("measured SNR matches the target over 100 draws") {
  std::mt19937_64 gen(3);
  Image clean = test::random_image(128, 128, gen, 0.0, 0.2);
  const Image mask = disk_mask(128, 80, 60, 9);
  for (std::size_t i = 0; i < clean.size(); ++i)
    if (mask[i] > 0) clean[i] += 0.8;
  for (double snr : {35.0, 30.0, 25.0, 20.0, 15.0, 10.0, 5.0, 0.0}) {
    double sum = 0;
    for (std::uint64_t d = 0; d < 100; ++d) sum += measured_snr_db(clean, add_noise(clean, mask, snr, d), mask);
    CAPTURE(snr);
    CHECK(std::abs(sum / 100 - snr) < 0.2);
  }
}

TEST_CASE("noise is zero-mean, reproducible and allows negative pixels") {
  const Image clean(64, 64, 0.0);
  Image mask(64, 64);
  mask(10, 10) = 1.0;
  Image c2 = clean;
  c2(10, 10) = 1.0;
  const Image a = add_noise(c2, mask, 0.0, 42);
  const Image b = add_noise(c2, mask, 0.0, 42);
  const Image c = add_noise(c2, mask, 0.0, 43);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  double mean = 0, mn = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i != 10 * 64 + 10) mean += a[i];
    mn = std::min(mn, a[i]);
  }
  CHECK(std::abs(mean / (a.size() - 1)) < 0.05);
  CHECK(mn < 0.0);
}

TEST_CASE("pair noise draws the two wavelengths independently") {
  SpaPair p{{Image(32, 32, 0.5), 700.0}, {Image(32, 32, 0.5), 850.0}, std::nullopt, 0};
  const Image mask(32, 32, 1.0);
  const SpaPair n = add_pair_noise(p, mask, 10.0, 5);
  REQUIRE(n.snr_db.has_value());
  CHECK(*n.snr_db == 10.0);
  CHECK(n.seed == 5);
  double corr = 0;
  for (std::size_t i = 0; i < 1024; ++i) corr += (n.img700.pixels[i] - 0.5) * (n.img850.pixels[i] - 0.5);
  const double var = 0.25 * 0.1;
  CHECK(std::abs(corr / 1024 / var) < 0.15);
}

TEST_CASE("normalize_pair divides both images by the joint maximum") {
  std::mt19937_64 gen(9);
  SpaPair p{{test::random_image(16, 16, gen, 0.1, 2.0), 700.0}, {test::random_image(16, 16, gen, 0.1, 3.0), 850.0},
            std::nullopt, 0};
  p.img850.pixels(3, 4) = 4.0;
  const SpaPair n = normalize_pair(p);
  for (std::size_t i = 0; i < 256; ++i) {
    CHECK(n.img700.pixels[i] == p.img700.pixels[i] / 4.0);
    CHECK(n.img850.pixels[i] == p.img850.pixels[i] / 4.0);
    CHECK(n.img700.pixels[i] / n.img850.pixels[i] ==
          doctest::Approx(p.img700.pixels[i] / p.img850.pixels[i]).epsilon(1e-14));
  }
  const SpaPair again = normalize_pair(n);
  CHECK(again.img700.pixels == n.img700.pixels);
  CHECK(again.img850.pixels == n.img850.pixels);
  SpaPair zero{{Image(4, 4), 700.0}, {Image(4, 4), 850.0}, std::nullopt, 0};
  CHECK_THROWS_AS(normalize_pair(zero), ValidationError);
}

TEST_CASE("image writers") {
  test::TempDir dir("img");
  Image img(2, 3);
  img(0, 0) = -1.0;
  img(1, 2) = 1.0;
  img(0, 1) = 0.25;
  write_pgm(dir / "a.pgm", img);
  const std::string pgm = raw_io::read_file(dir / "a.pgm");
  const std::string header = "P5\n3 2\n255\n";
  REQUIRE(pgm.size() == header.size() + 6);
  CHECK(pgm.substr(0, header.size()) == header);
  CHECK(static_cast<unsigned char>(pgm[header.size()]) == 0);
  CHECK(static_cast<unsigned char>(pgm[header.size() + 5]) == 255);

  write_f32(dir / "a.f32", img);
  const std::string raw = raw_io::read_file(dir / "a.f32");
  REQUIRE(raw.size() == 24);
  std::vector<float> back(6);
  raw_io::read_f32_le(raw.data(), back);
  CHECK(back[1] == 0.25f);

  write_csv(dir / "a.csv", img);
  CHECK(raw_io::read_file(dir / "a.csv") == "-1,0.25,0\n0,0,1\n");
}
