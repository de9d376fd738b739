#include "unmix.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace spa {

namespace {

bool nonsingular(const std::array<double, 4>& a) {
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  const double det = a[0] * a[3] - a[1] * a[2];
  return std::abs(det) > 1e-12 * scale * scale;
}

}  // namespace

UnmixMatrix::UnmixMatrix(std::array<double, 4> entries) : a_(entries) {
  for (double v : a_) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("unmix matrix entries must be positive");
  }
  if (!nonsingular(a_)) throw ValidationError("unmix matrix is singular");
}

UnmixMatrix UnmixMatrix::from_spectrum(const ChromophoreSpectrum& spectrum, double wavelength_a_nm,
                                       double wavelength_b_nm) {
  return UnmixMatrix({spectrum.absorption_at(wavelength_a_nm, Chromophore::HbO2),
                      spectrum.absorption_at(wavelength_a_nm, Chromophore::Hb),
                      spectrum.absorption_at(wavelength_b_nm, Chromophore::HbO2),
                      spectrum.absorption_at(wavelength_b_nm, Chromophore::Hb)});
}

namespace {

ConcentrationPair solve(const std::array<double, 4>& m, std::array<double, 2> b) {
  const double a00 = m[0], a01 = m[1], a10 = m[2], a11 = m[3];
  auto residual = [&](double x0, double x1) {
    const double r0 = a00 * x0 + a01 * x1 - b[0];
    const double r1 = a10 * x0 + a11 * x1 - b[1];
    return r0 * r0 + r1 * r1;
  };

  ConcentrationPair best{0.0, 0.0};
  double best_r = residual(0.0, 0.0);
  auto consider = [&](double x0, double x1) {
    const double r = residual(x0, x1);
    if (r < best_r || (r == best_r && x0 > best.c_hbo2)) {
      best = {x0, x1};
      best_r = r;
    }
  };

  // Both free: the square system solved exactly.
  const double det = a00 * a11 - a01 * a10;
  const double x0 = (b[0] * a11 - a01 * b[1]) / det;
  const double x1 = (a00 * b[1] - a10 * b[0]) / det;
  if (x0 >= 0.0 && x1 >= 0.0) consider(x0, x1);

  // One coordinate pinned at zero: 1D projection onto the other column.
  consider(std::max(0.0, (a00 * b[0] + a10 * b[1]) / (a00 * a00 + a10 * a10)), 0.0);
  consider(0.0, std::max(0.0, (a01 * b[0] + a11 * b[1]) / (a01 * a01 + a11 * a11)));
  return best;
}

}  // namespace

ConcentrationPair nnls2(const UnmixMatrix& a, std::array<double, 2> b) { return solve(a.entries(), b); }

ConcentrationPair nnls2(const std::array<double, 4>& a, std::array<double, 2> b) {
  for (double v : a) {
    if (!std::isfinite(v)) throw ValidationError("nnls2: matrix entries must be finite");
  }
  if (!nonsingular(a)) throw ValidationError("nnls2: matrix is singular");
  return solve(a, b);
}

So2Estimate so2_from_conc(ConcentrationPair c) {
  const double total = c.c_hbo2 + c.c_hb;
  if (!(total > 0.0)) return {0.0, false};
  return {c.c_hbo2 / total, true};
}

LuResult lu_map(const Image& img700, const Image& img850, const UnmixMatrix& a, const Image& mask) {
  require_same_shape(img700, img850, "lu_map");
  require_same_shape(img700, mask, "lu_map");
  LuResult result{Image(mask.rows(), mask.cols()), 0};
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!(mask[i] > 0.0)) continue;
    const So2Estimate est = so2_from_conc(nnls2(a, {img700[i], img850[i]}));
    if (est.valid) {
      result.so2[i] = est.so2;
    } else {
      ++result.invalid_pixels;
    }
  }
  return result;
}

}  // namespace spa
