#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "weyllab/measures.hpp"
#include "weyllab/potentials.hpp"
#include "weyllab/spectral.hpp"

namespace weyllab {

struct ReportRow {
  double parameter = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;        // lhs / rhs, 0 when degenerate
  double uncertainty = 0.0;  // statistical error or certified remainder on lhs
  bool degenerate = false;   // rhs vanished; excluded from the verdict
};

struct Verdict {
  double final_ratio = 0.0;        // ratio at the asymptotic end of the grid
  double last_quartile_mean = 0.0;
  double drift_slope = 0.0;        // log-log slope of ratio against parameter
  bool trend_ok = false;           // |ratio-1| did not grow across the grid
  bool pass = false;
  std::string note;
};

/// One "lhs ~ rhs" claim measured across a parameter grid. Rows are ordered
/// so that the asymptotic direction (t down, hbar down, lambda up) comes last.
struct AsymptoticReport {
  std::string experiment_id;
  std::string parameter_name;  // "lambda", "t" or "hbar"
  std::string claim;
  std::vector<ReportRow> rows;
  Verdict verdict;
  std::vector<std::pair<std::string, double>> extras;  // extra verdict scalars
};

// CSV columns: parameter,lhs,rhs,ratio,uncertainty.
void write_report_csv(std::ostream& os, const AsymptoticReport& report);
// {"experiment_id", "final_ratio", "drift_slope", "pass", ...} as JSON text.
std::string verdict_json(const AsymptoticReport& report);

/// Classical Weyl law: N(lambda) against (2 pi)^{-n} omega_n weyl_integral.
AsymptoticReport classical_weyl_report(const Potential& V, const Spectrum& s,
                                       std::span<const double> lam_grid, double rel_tol = 0.05);

/// Semiclassical Weyl law on the open interval (a, b): hbar^n N_hbar(I)
/// against (2 pi)^{-n} phase_space_volume.
AsymptoticReport semiclassical_weyl_report(const Potential& V, double a, double b,
                                           const std::vector<Spectrum>& spectra,
                                           double rel_tol = 0.10);

/// Heat trace, classical mode: hbar fixed by the spectrum, t sweeps down;
/// rhs = (4 pi t hbar^2)^{-n/2} exp_integral(V, t). Requires a certified tail
/// for every t (throws TailNotCertified otherwise).
AsymptoticReport heat_trace_report(const Potential& V, const Spectrum& s,
                                   std::span<const double> t_grid, double rel_tol = 1e-3);

/// Heat trace, semiclassical mode: t fixed, hbar sweeps down.
AsymptoticReport heat_trace_report_semiclassical(const Potential& V,
                                                 const std::vector<Spectrum>& spectra, double t,
                                                 double rel_tol = 0.05);

/// Extended KHL pair: premise ratio laplace(mu,t) / (t^{-alpha} laplace(nu,t))
/// over t down, and conclusion ratio cumulative(mu,lambda) /
/// fractional_avg(nu,alpha,lambda) over lambda up.
std::pair<AsymptoticReport, AsymptoticReport> tauberian_classical(
    const StieltjesMeasure& mu, const StieltjesMeasure& nu, FractionalIndex alpha,
    std::span<const double> t_grid, std::span<const double> lam_grid, double premise_tol = 1e-3,
    double conclusion_tol = 0.02);

/// Semiclassical KHL: rows indexed by hbar with lhs = hbar^{2 alpha} mu_hbar(I)
/// and rhs = fractional_interval(nu, alpha, I). The premise ratio
/// laplace(mu_hbar, t) / ((t hbar^2)^{-alpha} laplace(nu, t)) is recorded in
/// the extras both at t_probe and over a wider dyadic t range.
AsymptoticReport tauberian_semiclassical(
    const std::vector<std::pair<double, StieltjesMeasure>>& mu_family, const StieltjesMeasure& nu,
    FractionalIndex alpha, double t_probe, double a, double b, double rel_tol = 0.10);

/// The staircase measure demo: doubling constant stays below 2 sqrt(2) while
/// the dyadic Laplace ratio L(t/2)/L(t) refuses to converge (spread of the
/// last eight dyadic points above 0.1).
AsymptoticReport nonregular_demo(int levels, int k_min = 4, int k_max = 16);

/// The composition the Weyl experiments rely on: nu = (4 pi)^{-n/2} sigma,
/// which turns the heat-trace premise into the KHL hypothesis with alpha = n/2.
StieltjesMeasure weyl_normalized_sigma(const Potential& V, std::span<const double> lam_grid,
                                       const MonteCarloConfig& mc = {});

/// Scans keep the raw sample schema (lambda, r, beta, value, std_error,
/// n_samples) next to a fitted log-log slope.
struct ScanReport {
  std::string experiment_id;
  std::string claim;
  std::vector<OscillationSample> rows;
  double slope = 0.0;
  double final_value = 0.0;
  bool pass = false;
};

void write_scan_csv(std::ostream& os, const ScanReport& report);
std::string scan_verdict_json(const ScanReport& report);

/// sigma(lambda) over a grid with a fitted log-log slope; pass when the slope
/// lies in [slope_lo, slope_hi].
ScanReport sigma_scan(const Potential& V, std::span<const double> lam_grid, double slope_lo,
                      double slope_hi, const MonteCarloConfig& mc = {}, int threads = 0);

/// Oscillation quotient q(lambda) at probe radius r = min(1, lambda^{mu_exponent - 1/2});
/// mu_exponent = 1/6 reproduces the mu(lambda) = lambda^{1/6} verification rule,
/// mu_exponent = 0 probes at r = lambda^{-1/2}.
ScanReport oscillation_scan(const Potential& V, std::span<const double> lam_grid, double beta,
                            double mu_exponent, double slope_lo, double slope_hi,
                            const MonteCarloConfig& mc = {}, int threads = 0);

}  // namespace weyllab
