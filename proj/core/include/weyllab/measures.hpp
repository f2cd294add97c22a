#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "weyllab/errors.hpp"

namespace weyllab {

// Fractional order of the Riemann-Liouville-type average nu^alpha. The
// classical Tauberian path needs alpha > 0; the semiclassical path admits
// alpha = 0, where nu^0 degenerates to nu itself.
struct FractionalIndex {
  double alpha;
  explicit FractionalIndex(double a) : alpha(a) {
    if (!(a >= 0.0)) throw InvalidParameters("FractionalIndex requires alpha >= 0");
  }
};

struct Atom {
  double position;  // >= 0
  double weight;    // > 0
};

/// Nonnegative measure on [0, inf) induced by an increasing function.
/// Two representations:
///  - Atoms: point masses at strictly increasing positions;
///  - SampledCDF: strictly increasing abscissae with a nondecreasing
///    cumulative-mass array, linearly interpolated in between (piecewise
///    constant density), zero mass below the first abscissa. Any mass at the
///    first abscissa itself is an atom there.
class StieltjesMeasure {
 public:
  static StieltjesMeasure from_atoms(std::vector<Atom> atoms, std::string label = "");
  static StieltjesMeasure from_cdf(std::vector<double> abscissae, std::vector<double> cumulative,
                                   std::string label = "");

  bool is_atomic() const { return atomic_; }
  const std::vector<Atom>& atoms() const;
  const std::vector<double>& abscissae() const;
  const std::vector<double>& cdf_values() const;
  const std::string& label() const { return label_; }

  double total_mass() const;
  double support_min() const;
  double support_max() const;

  StieltjesMeasure scaled(double factor) const;  // factor > 0

 private:
  StieltjesMeasure() = default;

  bool atomic_ = true;
  std::vector<Atom> atoms_;
  std::vector<double> abscissae_;
  std::vector<double> cdf_;
  std::string label_;
};

/// Total mass of [0, lam]; 0 below the support. Atoms count positions <= lam,
/// a SampledCDF interpolates linearly.
double cumulative(const StieltjesMeasure& m, double lam);

/// Mass of the open interval (a, b).
double interval_mass(const StieltjesMeasure& m, double a, double b);

/// Laplace-Stieltjes transform  int e^{-t r} dm(r), t > 0. Closed form per
/// atom / per CDF cell; cell sums stop once the certified remainder drops
/// below 1e-14 of the accumulated value.
double laplace(const StieltjesMeasure& m, double t);

/// Fractional cumulative average
///   nu^alpha(s) = (1 / Gamma(alpha+1)) int_0^s (s - r)^alpha dm(r).
double fractional_avg(const StieltjesMeasure& m, FractionalIndex alpha, double s);

/// Mass of (a, b) under the measure d nu^alpha, i.e.
///   (1 / Gamma(alpha)) int_a^b [ int_0^r (r - s)^{alpha-1} dm(s) ] dr
/// = (1 / (alpha Gamma(alpha))) int [ (b - r)_+^alpha - (a - r)_+^alpha ] dm(r).
/// With this normalization fractional_interval(m, alpha, 0, s) equals
/// fractional_avg(m, alpha, s). alpha = 0 degenerates to interval_mass.
double fractional_interval(const StieltjesMeasure& m, FractionalIndex alpha, double a, double b);

/// Empirical doubling constant: max of cumulative(2s)/cumulative(s) over a
/// geometric grid of s in [s0, s_max/2].
double doubling_estimate(const StieltjesMeasure& m, double s0, double s_max,
                         int points_per_decade = 64);

/// Tail-to-head ratio of the Laplace mass split at b/t:
///   int_{b/t}^inf e^{-tr} dm / int_0^{b/t} e^{-tr} dm.
double tail_ratio(const StieltjesMeasure& m, double b, double t);

/// The staircase counterexample measure: nu = 0 on [0, 1/2), nu = 2^{k-1} on
/// (2^{k-1}, 2^k] for even k and sqrt(2) 2^{k-1} for odd k, realized as atoms
/// at the jump points up to 2^K. Doubling constant 2 sqrt(2), yet the Laplace
/// transform is not asymptotically regularly varying.
StieltjesMeasure staircase_nu(int levels);

/// Materializes nu^alpha as a SampledCDF: exact fractional_avg values on a
/// geometric grid, with extra knots graded toward each atom so the
/// (s - r)^alpha kinks do not pollute downstream Laplace transforms.
StieltjesMeasure fractional_measure(const StieltjesMeasure& m, FractionalIndex alpha,
                                    double s_min, double s_max, int points_per_decade = 64);

// Measure file format: header line "atoms" or "cdf", then one
// "position,value" pair per line (value = weight resp. cumulative mass).
void write_measure(std::ostream& os, const StieltjesMeasure& m);
StieltjesMeasure read_measure(std::istream& is, std::string label = "");

}  // namespace weyllab
