#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "chromophores.hpp"
#include "error.hpp"
#include "helpers.hpp"

using namespace spa;

namespace {

ChromophoreSpectrum two_point(double a, double b, double c, double d) {
  return ChromophoreSpectrum({{700.0, a, b}, {900.0, c, d}});
}

}  // namespace

TEST_CASE("absorption_at returns exact table values") {
  const ChromophoreSpectrum s({{700.0, 2.0, 8.0}, {850.0, 5.0, 4.0}});
  CHECK(s.absorption_at(700.0, Chromophore::HbO2) == 2.0);
  CHECK(s.absorption_at(700.0, Chromophore::Hb) == 8.0);
  CHECK(s.absorption_at(850.0, Chromophore::Hb) == 4.0);
}

TEST_CASE("absorption_at interpolates linearly between entries") {
  const auto s = two_point(2.0, 8.0, 6.0, 4.0);
  CHECK(s.absorption_at(800.0, Chromophore::HbO2) == doctest::Approx((2.0 + 6.0) / 2).epsilon(1e-15));
  CHECK(s.absorption_at(800.0, Chromophore::Hb) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(s.absorption_at(750.0, Chromophore::HbO2) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("absorption_at rejects wavelengths outside the table") {
  const auto s = two_point(2.0, 8.0, 6.0, 4.0);
  CHECK_THROWS_AS(s.absorption_at(699.0, Chromophore::HbO2), RangeError);
  CHECK_THROWS_AS(s.absorption_at(900.5, Chromophore::Hb), RangeError);
  CHECK_THROWS_AS(s.absorption_at(std::nan(""), Chromophore::Hb), RangeError);
}

TEST_CASE("blood_mu_a mixes the two chromophores linearly") {
  const ChromophoreSpectrum s({{700.0, 2.0, 8.0}, {850.0, 5.0, 4.0}});
  CHECK(s.blood_mu_a(1.0, 700.0) == 2.0);
  CHECK(s.blood_mu_a(0.0, 700.0) == 8.0);
  CHECK(s.blood_mu_a(0.5, 850.0) == doctest::Approx(4.5).epsilon(1e-15));
  CHECK_THROWS_AS(s.blood_mu_a(-0.01, 700.0), ValidationError);
  CHECK_THROWS_AS(s.blood_mu_a(1.01, 700.0), ValidationError);
}

TEST_CASE("spectrum construction enforces its invariants") {
  CHECK_THROWS_AS(ChromophoreSpectrum({}), ValidationError);
  CHECK_THROWS_AS(ChromophoreSpectrum({{700.0, 0.0, 1.0}, {850.0, 1.0, 1.0}}), ValidationError);
  CHECK_THROWS_AS(ChromophoreSpectrum({{850.0, 1.0, 1.0}, {700.0, 1.0, 1.0}}), ValidationError);
  CHECK_THROWS_AS(ChromophoreSpectrum({{700.0, 1.0, 1.0}, {700.0, 1.0, 1.0}}), ValidationError);
  // must span both study wavelengths
  CHECK_THROWS_AS(ChromophoreSpectrum({{710.0, 1.0, 1.0}, {850.0, 1.0, 1.0}}), ValidationError);
  CHECK_THROWS_AS(ChromophoreSpectrum({{700.0, 1.0, 1.0}, {840.0, 1.0, 1.0}}), ValidationError);
}

TEST_CASE("load_spectrum parses minimal input") {
  const auto s = load_spectrum("700,2.0,8.0\n850,5.0,4.0");
  REQUIRE(s.entries().size() == 2);
  CHECK(s.entries()[1].wavelength_nm == 850.0);
  CHECK(s.entries()[1].mu_a_hb == 4.0);
}

TEST_CASE("load_spectrum accepts header, blank lines and CRLF") {
  const auto s = load_spectrum("wavelength_nm,mu_a_hbo2_cm1,mu_a_hb_cm1\r\n\r\n700, 2.0 ,8.0\r\n\n850,5.0,4.0\r\n");
  CHECK(s.entries().size() == 2);
  CHECK(s.absorption_at(700.0, Chromophore::HbO2) == 2.0);
}

TEST_CASE("load_spectrum reports malformed input as parse errors") {
  auto parse_kind = [](std::string_view text) {
    try {
      load_spectrum(text);
    } catch (const DataError& e) {
      return e.kind();
    }
    FAIL("no error for: " << text);
    return DataError::Kind::Io;
  };
  CHECK(parse_kind("") == DataError::Kind::Parse);
  CHECK(parse_kind("\n\n") == DataError::Kind::Parse);
  CHECK(parse_kind("850,5.0,4.0\n700,2.0,8.0") == DataError::Kind::Parse);
  CHECK(parse_kind("700,2.0\n850,5.0,4.0") == DataError::Kind::Parse);
  CHECK(parse_kind("700,2.0,8.0,1\n850,5.0,4.0") == DataError::Kind::Parse);
  CHECK(parse_kind("700,abc,8.0\n850,5.0,4.0") == DataError::Kind::Parse);
  CHECK(parse_kind("700,-1,8.0\n850,5.0,4.0") == DataError::Kind::Parse);
  CHECK(parse_kind("700,2.0,8.0\n800,5.0,4.0") == DataError::Kind::Parse);  // does not reach 850

  try {
    load_spectrum("700,2.0,8.0\n\n700,5.0,4.0");
    FAIL("expected parse error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("format_spectrum_csv round-trips exactly") {
  const auto s = default_spectrum();
  const auto back = load_spectrum(format_spectrum_csv(s));
  REQUIRE(back.entries().size() == s.entries().size());
  for (std::size_t i = 0; i < s.entries().size(); ++i) {
    CHECK(back.entries()[i].wavelength_nm == s.entries()[i].wavelength_nm);
    CHECK(back.entries()[i].mu_a_hbo2 == s.entries()[i].mu_a_hbo2);
    CHECK(back.entries()[i].mu_a_hb == s.entries()[i].mu_a_hb);
  }
}

TEST_CASE("default spectrum follows ln(10) * epsilon * C") {
  const auto s = default_spectrum(150.0);
  const double molar = 150.0 / 64500.0;
  // Prahl: epsilon(700) = 290 / 1794.28, epsilon(850) = 1058 / 691.32 (cm^-1/M)
  CHECK(s.absorption_at(700.0, Chromophore::HbO2) == doctest::Approx(std::numbers::ln10 * 290.0 * molar));
  CHECK(s.absorption_at(700.0, Chromophore::Hb) == doctest::Approx(std::numbers::ln10 * 1794.28 * molar));
  CHECK(s.absorption_at(850.0, Chromophore::HbO2) == doctest::Approx(std::numbers::ln10 * 1058.0 * molar));
  CHECK(s.absorption_at(850.0, Chromophore::Hb) == doctest::Approx(std::numbers::ln10 * 691.32 * molar));
  // deoxy dominates at 700, oxy at 850: the contrast the two-wavelength method relies on
  CHECK(s.absorption_at(700.0, Chromophore::Hb) > s.absorption_at(700.0, Chromophore::HbO2));
  CHECK(s.absorption_at(850.0, Chromophore::HbO2) > s.absorption_at(850.0, Chromophore::Hb));
  // linear in concentration
  CHECK(default_spectrum(75.0).absorption_at(850.0, Chromophore::Hb) ==
        doctest::Approx(0.5 * s.absorption_at(850.0, Chromophore::Hb)));
  CHECK_THROWS_AS(default_spectrum(0.0), ValidationError);
}

TEST_CASE("shipped spectrum file matches the built-in table") {
  const auto file = load_spectrum_file(SPA_DATA_DIR "/hemoglobin_150gL.csv");
  const auto builtin = default_spectrum();
  REQUIRE(file.entries().size() == builtin.entries().size());
  for (double wl : {700.0, 850.0}) {
    CHECK(file.absorption_at(wl, Chromophore::HbO2) == builtin.absorption_at(wl, Chromophore::HbO2));
    CHECK(file.absorption_at(wl, Chromophore::Hb) == builtin.absorption_at(wl, Chromophore::Hb));
  }
}

TEST_CASE("load_spectrum_file reports a missing file as an io error") {
  try {
    load_spectrum_file("/nonexistent/spectrum.csv");
    FAIL("expected io error");
  } catch (const DataError& e) {
    CHECK(e.kind() == DataError::Kind::Io);
  }
}

TEST_CASE("optical properties validation") {
  CHECK_NOTHROW(OpticalProperties{0.1, 10.0, 0.9}.validate());
  CHECK_NOTHROW(OpticalProperties{0.0, 0.0, -1.0}.validate());
  CHECK_THROWS_AS(OpticalProperties({-0.1, 10.0, 0.9}).validate(), ValidationError);
  CHECK_THROWS_AS(OpticalProperties({0.1, -1.0, 0.9}).validate(), ValidationError);
  CHECK_THROWS_AS(OpticalProperties({0.1, 1.0, 1.5}).validate(), ValidationError);
}
