#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace spa {

enum class Chromophore { HbO2, Hb };

struct OpticalProperties {
  double mu_a = 0.0;  ///< absorption, cm^-1
  double mu_s = 0.0;  ///< scattering, cm^-1
  double g = 0.0;     ///< scattering anisotropy

  /// Throws ValidationError when mu_a < 0, mu_s < 0 or |g| > 1.
  void validate() const;

  friend bool operator==(const OpticalProperties&, const OpticalProperties&) = default;
};

struct SpectrumEntry {
  double wavelength_nm = 0.0;
  double mu_a_hbo2 = 0.0;  ///< cm^-1
  double mu_a_hb = 0.0;    ///< cm^-1
};

/// Tabulated absorption of oxy- and deoxyhemoglobin. Wavelengths are strictly
/// increasing, every value is positive and the table spans 700-850 nm.
class ChromophoreSpectrum {
 public:
  explicit ChromophoreSpectrum(std::vector<SpectrumEntry> entries);

  /// Exact table value when present, otherwise linear interpolation between
  /// the bracketing entries. Throws RangeError outside the table.
  double absorption_at(double wavelength_nm, Chromophore chromophore) const;

  /// so2 * mu_a(HbO2) + (1 - so2) * mu_a(Hb). Throws ValidationError for so2
  /// outside [0, 1].
  double blood_mu_a(double so2, double wavelength_nm) const;

  const std::vector<SpectrumEntry>& entries() const noexcept { return entries_; }

 private:
  std::vector<SpectrumEntry> entries_;
};

inline constexpr std::string_view kSpectrumHeader = "wavelength_nm,mu_a_hbo2_cm1,mu_a_hb_cm1";

/// Parses the spectrum CSV. The header line is optional; blank lines are
/// skipped. Errors are DataError(Parse) naming the offending line.
ChromophoreSpectrum load_spectrum(std::string_view text);
ChromophoreSpectrum load_spectrum_file(const std::filesystem::path& path);
std::string format_spectrum_csv(const ChromophoreSpectrum& spectrum);

inline constexpr double kDefaultHemoglobinGramsPerLiter = 150.0;
inline constexpr double kHemoglobinMolarMassGramsPerMole = 64500.0;

/// Built-in spectrum from tabulated molar extinction coefficients
/// (cm^-1/M, Prahl's compilation) via mu_a = ln(10) * epsilon * C_molar.
ChromophoreSpectrum default_spectrum(double hemoglobin_g_per_l = kDefaultHemoglobinGramsPerLiter);

}  // namespace spa
