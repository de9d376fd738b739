#include "chromophores.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "error.hpp"

namespace spa {

namespace {

struct ExtinctionRow {
  double wavelength_nm;
  double hbo2;  // cm^-1 / M
  double hb;
};

// Molar extinction coefficients of hemoglobin, S. Prahl (OMLC), from
// W. B. Gratzer and N. Kollias.
constexpr ExtinctionRow kExtinction[] = {
    {690.0, 276.0, 2051.96}, {700.0, 290.0, 1794.28}, {710.0, 314.0, 1540.48},
    {720.0, 348.0, 1325.88}, {830.0, 974.0, 693.04},  {840.0, 1022.0, 692.36},
    {850.0, 1058.0, 691.32}, {860.0, 1092.0, 694.32}, {870.0, 1128.0, 705.84},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
  throw DataError(DataError::Kind::Parse, "spectrum line " + std::to_string(line) + ": " + msg);
}

double parse_field(std::string_view field, std::size_t line) {
  field = trim(field);
  double value = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    parse_fail(line, "'" + std::string(field) + "' is not a number");
  }
  return value;
}

}  // namespace

void OpticalProperties::validate() const {
  if (!(mu_a >= 0.0) || !(mu_s >= 0.0) || !(std::abs(g) <= 1.0)) {
    std::ostringstream msg;
    msg << "invalid optical properties (mu_a=" << mu_a << ", mu_s=" << mu_s << ", g=" << g << ")";
    throw ValidationError(msg.str());
  }
}

ChromophoreSpectrum::ChromophoreSpectrum(std::vector<SpectrumEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) {
    throw ValidationError("spectrum has no entries");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (!(e.mu_a_hbo2 > 0.0) || !(e.mu_a_hb > 0.0)) {
      throw ValidationError("spectrum entry " + std::to_string(i) + " has non-positive absorption");
    }
    if (i > 0 && !(e.wavelength_nm > entries_[i - 1].wavelength_nm)) {
      throw ValidationError("spectrum wavelengths must be strictly increasing (entry " + std::to_string(i) + ")");
    }
  }
  if (entries_.front().wavelength_nm > 700.0 || entries_.back().wavelength_nm < 850.0) {
    throw ValidationError("spectrum must cover 700 nm and 850 nm");
  }
}

double ChromophoreSpectrum::absorption_at(double wavelength_nm, Chromophore chromophore) const {
  auto pick = [chromophore](const SpectrumEntry& e) {
    return chromophore == Chromophore::HbO2 ? e.mu_a_hbo2 : e.mu_a_hb;
  };
  if (!(wavelength_nm >= entries_.front().wavelength_nm && wavelength_nm <= entries_.back().wavelength_nm)) {
    std::ostringstream msg;
    msg << "wavelength " << wavelength_nm << " nm outside spectrum range [" << entries_.front().wavelength_nm
        << ", " << entries_.back().wavelength_nm << "]";
    throw RangeError(msg.str());
  }
  auto hi = std::lower_bound(entries_.begin(), entries_.end(), wavelength_nm,
                             [](const SpectrumEntry& e, double wl) { return e.wavelength_nm < wl; });
  if (hi->wavelength_nm == wavelength_nm) {
    return pick(*hi);
  }
  const auto lo = std::prev(hi);
  const double t = (wavelength_nm - lo->wavelength_nm) / (hi->wavelength_nm - lo->wavelength_nm);
  return pick(*lo) + t * (pick(*hi) - pick(*lo));
}

double ChromophoreSpectrum::blood_mu_a(double so2, double wavelength_nm) const {
  if (!(so2 >= 0.0 && so2 <= 1.0)) {
    throw ValidationError("so2 must lie in [0, 1], got " + std::to_string(so2));
  }
  return so2 * absorption_at(wavelength_nm, Chromophore::HbO2) +
         (1.0 - so2) * absorption_at(wavelength_nm, Chromophore::Hb);
}

ChromophoreSpectrum load_spectrum(std::string_view text) {
  std::vector<SpectrumEntry> entries;
  std::size_t line_no = 0;
  bool first_content = true;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (first_content) {
      first_content = false;
      if (line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
      if (line == kSpectrumHeader) continue;
    }
    double fields[3];
    std::size_t n = 0;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      if (n == 3) parse_fail(line_no, "expected 3 fields");
      fields[n++] = parse_field(rest.substr(0, comma), line_no);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (n != 3) parse_fail(line_no, "expected 3 fields");
    if (!(fields[1] > 0.0) || !(fields[2] > 0.0)) parse_fail(line_no, "absorption must be positive");
    if (!entries.empty() && !(fields[0] > entries.back().wavelength_nm)) {
      parse_fail(line_no, "wavelengths must be strictly increasing");
    }
    entries.push_back({fields[0], fields[1], fields[2]});
  }
  if (entries.empty()) {
    throw DataError(DataError::Kind::Parse, "spectrum line " + std::to_string(line_no) + ": no data rows");
  }
  try {
    return ChromophoreSpectrum(std::move(entries));
  } catch (const ValidationError& e) {
    throw DataError(DataError::Kind::Parse, std::string("spectrum: ") + e.what());
  }
}

ChromophoreSpectrum load_spectrum_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError(DataError::Kind::Io, "cannot open spectrum file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_spectrum(buf.str());
}

std::string format_spectrum_csv(const ChromophoreSpectrum& spectrum) {
  std::ostringstream out;
  out.precision(17);
  out << kSpectrumHeader << '\n';
  for (const auto& e : spectrum.entries()) {
    out << e.wavelength_nm << ',' << e.mu_a_hbo2 << ',' << e.mu_a_hb << '\n';
  }
  return out.str();
}

ChromophoreSpectrum default_spectrum(double hemoglobin_g_per_l) {
  if (!(hemoglobin_g_per_l > 0.0)) {
    throw ValidationError("hemoglobin concentration must be positive");
  }
  const double molar = hemoglobin_g_per_l / kHemoglobinMolarMassGramsPerMole;
  std::vector<SpectrumEntry> entries;
  for (const auto& row : kExtinction) {
    entries.push_back({row.wavelength_nm, std::numbers::ln10 * row.hbo2 * molar, std::numbers::ln10 * row.hb * molar});
  }
  return ChromophoreSpectrum(std::move(entries));
}

}  // namespace spa
