#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weyllab/measures.hpp"
#include "weyllab/rng.hpp"

namespace weyllab {

struct MonteCarloConfig {
  std::size_t samples = 100000;
  std::uint64_t seed = 0x5eedba5eull;
};

struct MCValue {
  double value = 0.0;
  double std_error = 0.0;
};

/// A sampling stratum: a region of R^n with known volume from which uniform
/// draws are cheap. Monte-Carlo estimators decompose the integration domain
/// into an ordered list of strata; a point is owned by the first stratum whose
/// region contains it, so overlapping regions are never double counted.
struct Stratum {
  double volume = 0.0;
  std::function<void(Rng&, std::span<double>)> sample;        // uniform in the region
  std::function<bool(std::span<const double>)> contains;
};

/// Evaluable potential V: R^n -> [0, inf) with growth metadata. The growth
/// envelope maps rho to a lower bound of V on {|x| >= rho}; it must be
/// nondecreasing and diverge, which is what confines the sublevel sets.
struct Potential {
  int dim = 1;
  std::function<double(std::span<const double>)> evaluator;
  std::function<double(double)> growth_envelope;
  std::optional<std::function<double(double)>> analytic_sigma;
  std::string label;
  // Optional importance decomposition of the sublevel set Omega_lambda. When
  // absent, samplers fall back to the uniform bounding box derived from the
  // growth envelope. Cusp-type potentials whose sublevel sets span dozens of
  // decades in radius need this to keep acceptance rates sane.
  std::function<std::vector<Stratum>(double lam)> strata_factory;

  double operator()(std::span<const double> x) const { return evaluator(x); }

  /// Smallest rho with growth_envelope(rho) >= lam, doubled for safety.
  double bounding_radius(double lam) const;

  std::vector<Stratum> strata_for(double lam) const;
};

/// V(x) = |x|^kappa with sigma(lambda) = omega_n lambda^{n/kappa}.
Potential make_power(int dim, double kappa);

/// The two-regime sharpness example: V = |x|^{kappa2} on the cusp
/// U = {(x', s) : s > 1, |x'| < s^{-theta}} and |x|^{kappa1} elsewhere,
/// under the parameter constraints 1/(n-1) > theta > kappa1/2,
/// (1 - theta(n-1))/kappa2 > n/kappa1, kappa1 < 1.
Potential make_rozenbljum(double theta, double kappa1, double kappa2, int dim);

/// Sublevel volume sigma(lambda) = |{V <= lambda}|. Analytic when available
/// (std_error 0), else stratified Monte Carlo.
MCValue sigma(const Potential& V, double lam, const MonteCarloConfig& mc = {});

/// SampledCDF with cumulative = sigma at each grid point; Monte-Carlo noise is
/// clipped isotonically so the result is a valid increasing function.
StieltjesMeasure sigma_measure(const Potential& V, std::span<const double> lam_grid,
                               const MonteCarloConfig& mc = {});

/// int_{R^n} e^{-t V} dx. Tensor-grid adaptive quadrature for dim <= 2,
/// stratified MC above.
double exp_integral(const Potential& V, double t, const MonteCarloConfig& mc = {});

/// int (lambda - V)_+^{n/2} dx.
double weyl_integral(const Potential& V, double lam, const MonteCarloConfig& mc = {});

/// Liouville volume |{(x, xi) : |xi|^2 + V(x) in (a, b)}|, computed as
/// omega_n int [(b - V)_+^{n/2} - (a - V)_+^{n/2}] dx.
double phase_space_volume(const Potential& V, double a, double b,
                          const MonteCarloConfig& mc = {});

struct OscillationSample {
  double lam = 0.0;
  double r = 0.0;
  double beta = 0.0;
  double q_value = 0.0;    // normalized oscillation functional
  double std_error = 0.0;
  std::size_t n_samples = 0;
};

/// Monte-Carlo estimate of the beta-oscillation quotient
///   q = [ int_{Omega_lam} int_{S_r(x)} |V(x) - V(y)| dvol dx ]
///       / ( r^{n+2 beta - 1} lam^{1+beta} sigma(lam) ),
/// with x uniform on Omega_lam and y uniform on the Euclidean sphere S_r(x).
/// The sigma factor cancels between numerator and normalizer, so q carries no
/// volume-estimation noise.
OscillationSample oscillation_functional(const Potential& V, double lam, double r, double beta,
                                         const MonteCarloConfig& mc = {});

/// Empirical doubling constant of sigma over [lam0, lam_max].
double doubling_check(const Potential& V, double lam0, double lam_max,
                      const MonteCarloConfig& mc = {});

struct HolderSample {
  double lam = 0.0;
  double measured_v = 0.0;
};

/// Empirical smallest admissible v(lambda) in the quantified Hoelder bound
/// |V(x)-V(y)| <= d^{2 beta} max(V(x),1)^{1+beta} v(V(x)): max of the quotient
/// over sampled pairs with x on the level band V in [lam/2, lam] and
/// d(x, y) < 1 (d log-uniform in [1e-3, 1]).
std::vector<HolderSample> holder_envelope(const Potential& V, double beta,
                                          std::span<const double> lam_grid,
                                          const MonteCarloConfig& mc = {});

}  // namespace weyllab
