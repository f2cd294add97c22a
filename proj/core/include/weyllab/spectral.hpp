#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "weyllab/discretization.hpp"
#include "weyllab/measures.hpp"

namespace weyllab {

/// Validated low spectrum of a discrete Hamiltonian. Eigenvalues above
/// lambda_trust were computed but failed the two-grid Richardson comparison
/// and must not enter counting functions.
struct Spectrum {
  std::vector<double> eigenvalues;  // sorted ascending
  double hbar = 1.0;
  double lambda_trust = 0.0;
  GridSpec base_grid;
  GridSpec companion_grid;
  // Predicted counting function from the phase-space integral on the grid;
  // used as the tail-count proxy when certifying heat traces.
  std::function<double(double)> weyl_proxy;
};

/// k smallest eigenvalues: dense solver for dimension <= 2000, otherwise
/// shift-invert Krylov-Schur on a sparse LDLT factorization. Every returned
/// value satisfies ||H v - lambda v|| / ||v|| <= 1e-8 max(1, lambda);
/// lambda_trust comes from a two-grid comparison at 1e-2 relative.
Spectrum eigen_lowest(const DiscreteHamiltonian& H, int k);

/// N(lam) = #{ lambda_k < lam }, strict, multiplicity by repetition.
int counting(const Spectrum& s, double lam);

/// #{ lambda_k in the open interval (a, b) }.
int counting_interval(const Spectrum& s, double a, double b);

struct HeatTraceValue {
  double value = 0.0;
  bool tail_certified = false;
  double tail_bound = 0.0;
};

/// Sum of e^{-t lambda_k} over trusted eigenvalues. tail_certified is true
/// when the Weyl-proxy bound on the omitted tail is below 1e-3 of the value.
HeatTraceValue heat_trace(const Spectrum& s, double t);

/// Atoms at trusted eigenvalues with unit weights (multiplicities merge).
StieltjesMeasure spectrum_measure(const Spectrum& s);

/// Wraps an externally supplied eigenvalue list (model spectra, imports).
Spectrum spectrum_from_values(std::vector<double> eigenvalues, double hbar, double lambda_trust);

// CSV columns: index,eigenvalue,trusted (0/1).
void write_spectrum_csv(std::ostream& os, const Spectrum& s);
Spectrum read_spectrum_csv(std::istream& is, double hbar);

}  // namespace weyllab
