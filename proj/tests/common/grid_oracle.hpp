#pragma once

// Brute-force reference for the 2x2 nonnegative least-squares problem.
//
// Each level scans a grid of step h. The grid point nearest the true
// minimizer x* is within h*sqrt(2) of it, and for a quadratic with zero
// gradient along free directions its residual exceeds r(x*) by at most
// 2 ||A||_F^2 h^2. So x* lies within one step of the bounding box of all grid
// points whose residual is within that slack of the level minimum. The next
// level scans that box with h / 10, until the box is small enough.

#include <algorithm>
#include <array>
#include <cmath>

namespace spa::test {

inline double nnls_residual(const std::array<double, 4>& a, std::array<double, 2> b, double x0, double x1) {
  const double r0 = a[0] * x0 + a[1] * x1 - b[0];
  const double r1 = a[2] * x0 + a[3] * x1 - b[1];
  return r0 * r0 + r1 * r1;
}

struct GridResult {
  double x0 = 0.0, x1 = 0.0;  ///< best grid point at the finest level
  double width = 0.0;         ///< largest side of the final enclosing box
  bool converged = false;
};

/// Searches [0, box]^2; stops once the enclosure is narrower than `tol`.
inline GridResult grid_search_nnls(const std::array<double, 4>& a, std::array<double, 2> b, double box,
                                   double tol = 1e-3, long max_points = 40'000'000) {
  const double fro2 = a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3];
  double lo0 = 0.0, hi0 = box, lo1 = 0.0, hi1 = box;
  double h = box / 200.0;
  GridResult out;
  for (int level = 0; level < 12; ++level) {
    const long n0 = static_cast<long>(std::ceil((hi0 - lo0) / h)) + 1;
    const long n1 = static_cast<long>(std::ceil((hi1 - lo1) / h)) + 1;
    if (n0 * n1 > max_points) return out;
    double best = INFINITY;
    for (long i = 0; i < n0; ++i)
      for (long j = 0; j < n1; ++j) {
        const double x0 = lo0 + i * h, x1 = lo1 + j * h;
        const double r = nnls_residual(a, b, x0, x1);
        if (r < best) best = r, out.x0 = x0, out.x1 = x1;
      }
    const double cut = best + 2.0 * fro2 * h * h;
    double blo0 = INFINITY, bhi0 = -INFINITY, blo1 = INFINITY, bhi1 = -INFINITY;
    for (long i = 0; i < n0; ++i)
      for (long j = 0; j < n1; ++j) {
        const double x0 = lo0 + i * h, x1 = lo1 + j * h;
        if (nnls_residual(a, b, x0, x1) <= cut) {
          blo0 = std::min(blo0, x0), bhi0 = std::max(bhi0, x0);
          blo1 = std::min(blo1, x1), bhi1 = std::max(bhi1, x1);
        }
      }
    lo0 = std::max(0.0, blo0 - h), hi0 = bhi0 + h;
    lo1 = std::max(0.0, blo1 - h), hi1 = bhi1 + h;
    out.width = std::max(hi0 - lo0, hi1 - lo1);
    if (out.width < tol) {
      out.converged = true;
      return out;
    }
    h /= 10.0;
  }
  return out;
}

}  // namespace spa::test
