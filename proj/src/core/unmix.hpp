#pragma once

#include <array>
#include <cstddef>

#include "chromophores.hpp"
#include "grid.hpp"

namespace spa {

/// 2x2 absorption matrix: rows are wavelengths (700, 850 nm), columns are
/// (HbO2, Hb). Entries positive, matrix nonsingular.
class UnmixMatrix {
 public:
  /// Row-major {a(700,HbO2), a(700,Hb), a(850,HbO2), a(850,Hb)}.
  explicit UnmixMatrix(std::array<double, 4> entries);

  static UnmixMatrix from_spectrum(const ChromophoreSpectrum& spectrum, double wavelength_a_nm = 700.0,
                                   double wavelength_b_nm = 850.0);

  double operator()(int row, int col) const noexcept { return a_[row * 2 + col]; }
  const std::array<double, 4>& entries() const noexcept { return a_; }

 private:
  std::array<double, 4> a_;
};

struct ConcentrationPair {
  double c_hbo2 = 0.0;
  double c_hb = 0.0;
};

/// argmin ||A x - b|| over x >= 0, by enumerating the active sets of the
/// two-variable problem. Ties go to the larger c_hbo2.
ConcentrationPair nnls2(const UnmixMatrix& a, std::array<double, 2> b);

/// Same solver on a raw row-major matrix. Only non-singularity is required,
/// so zero entries (e.g. the identity) are fine. Throws ValidationError.
ConcentrationPair nnls2(const std::array<double, 4>& a, std::array<double, 2> b);

struct So2Estimate {
  double so2 = 0.0;
  bool valid = false;
};

/// c_hbo2 / (c_hbo2 + c_hb); (0, invalid) when both are zero.
So2Estimate so2_from_conc(ConcentrationPair c);

struct LuResult {
  Image so2;
  std::size_t invalid_pixels = 0;
};

/// Per-pixel unmixing inside `mask`; zero elsewhere and at invalid pixels.
LuResult lu_map(const Image& img700, const Image& img850, const UnmixMatrix& a, const Image& mask);

}  // namespace spa
