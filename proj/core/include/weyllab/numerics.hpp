#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "weyllab/errors.hpp"

namespace weyllab {

// Gamma(alpha + 1) for the fractional-average normalizations. lgamma on the
// positive axis is accurate to a few ulp, well inside the 1e-12 budget for
// alpha in (0, 50].
inline double gamma_alpha_plus_one(double alpha) {
  if (!(alpha > 0.0) || alpha > 50.0)
    throw GammaRangeError("alpha must lie in (0, 50], got " + std::to_string(alpha));
  return std::exp(std::lgamma(alpha + 1.0));
}

inline double gamma_of(double x) {
  if (!(x > 0.0) || x > 51.0)
    throw GammaRangeError("gamma argument must lie in (0, 51], got " + std::to_string(x));
  return std::exp(std::lgamma(x));
}

// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) {
  return std::pow(3.14159265358979323846264338328, 0.5 * n) / std::exp(std::lgamma(0.5 * n + 1.0));
}

constexpr double kPi = 3.14159265358979323846264338328;

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

// Geometric grid with `points_per_decade` samples per factor of 10,
// always including both endpoints.
inline std::vector<double> geometric_grid(double lo, double hi, int points_per_decade) {
  if (!(lo > 0.0) || !(hi > lo) || points_per_decade < 1)
    throw InvalidParameters("geometric_grid requires 0 < lo < hi and points_per_decade >= 1");
  const double decades = std::log10(hi / lo);
  const std::size_t n = static_cast<std::size_t>(std::ceil(decades * points_per_decade)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i)
    grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

// Least-squares slope of log(y) against log(x); ignores non-positive entries.
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw InvalidParameters("loglog_slope needs at least two positive points");
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw InvalidParameters("loglog_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

// Compensated accumulation; the Laplace sums mix magnitudes across ~20 decades.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace weyllab
