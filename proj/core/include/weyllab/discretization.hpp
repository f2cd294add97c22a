#pragma once

#include <Eigen/SparseCore>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "weyllab/potentials.hpp"

namespace weyllab {

/// Uniform tensor grid on (-L, L)^dim with Dirichlet boundary: only interior
/// points are kept, spacing h = 2L / (N + 1).
struct GridSpec {
  int dim = 1;               // 1 or 2
  double half_width = 1.0;   // L
  int points_per_axis = 16;  // N

  double spacing() const { return 2.0 * half_width / (points_per_axis + 1); }
  std::int64_t size() const {
    std::int64_t s = 1;
    for (int d = 0; d < dim; ++d) s *= points_per_axis;
    return s;
  }
  double coord(int i) const { return -half_width + (i + 1) * spacing(); }
};

/// Sparse symmetric discretization of hbar^2 Delta + V with the positive
/// Laplacian convention: second-order central differences, dropped neighbors
/// at the boundary.
struct DiscreteHamiltonian {
  GridSpec grid;
  double hbar = 1.0;
  Eigen::SparseMatrix<double> matrix;
  std::string potential_label;
  std::optional<double> lambda_trust;  // filled in by the spectral layer

  std::vector<double> potential_on_grid;        // diagonal V values, grid order
  std::shared_ptr<const Potential> potential;   // kept for companion-grid rebuilds

  std::int64_t dimension() const { return matrix.rows(); }
};

DiscreteHamiltonian build(const Potential& V, const GridSpec& grid, double hbar);

struct AdequacyReport {
  bool pass = false;
  bool boundary_ok = false;
  bool resolution_ok = false;
  double boundary_min_V = 0.0;    // min of V on the outermost interior shell
  double boundary_required = 0.0; // 3 * lam_target
  double resolution_value = 0.0;  // h^2 * lam_target
  double resolution_limit = 0.05;
};

/// Truncation/resolution heuristic: the box is adequate for eigenvalues up to
/// lam_target when V on the boundary shell dominates 3 lam_target (eigenmass
/// concentration) and h^2 lam_target <= 0.05.
AdequacyReport adequacy_check(const DiscreteHamiltonian& H, double lam_target);

}  // namespace weyllab
