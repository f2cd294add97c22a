#include "weyllab/discretization.hpp"

#include <cmath>
#include <limits>

#include "weyllab/errors.hpp"

namespace weyllab {

DiscreteHamiltonian build(const Potential& V, const GridSpec& grid, double hbar) {
  if (grid.dim != 1 && grid.dim != 2)
    throw InvalidParameters("discretization supports dim 1 or 2, got " + std::to_string(grid.dim));
  if (grid.points_per_axis < 16)
    throw GridTooCoarse("grid needs at least 16 points per axis, got " +
                        std::to_string(grid.points_per_axis));
  if (!(grid.half_width > 0.0) || !(hbar > 0.0))
    throw InvalidParameters("grid half-width and hbar must be positive");

  const int N = grid.points_per_axis;
  const double h = grid.spacing();
  const double kin = hbar * hbar / (h * h);

  DiscreteHamiltonian H;
  H.grid = grid;
  H.hbar = hbar;
  H.potential_label = V.label;
  H.potential = std::make_shared<Potential>(V);

  const std::int64_t dim = grid.size();
  H.potential_on_grid.resize(dim);

  std::vector<Eigen::Triplet<double>> trip;
  if (grid.dim == 1) {
    trip.reserve(3 * dim);
    for (int i = 0; i < N; ++i) {
      const double x[1] = {grid.coord(i)};
      const double v = V.evaluator(std::span<const double>(x, 1));
      H.potential_on_grid[i] = v;
      trip.emplace_back(i, i, 2.0 * kin + v);
      if (i > 0) trip.emplace_back(i, i - 1, -kin);
      if (i + 1 < N) trip.emplace_back(i, i + 1, -kin);
    }
  } else {
    trip.reserve(5 * dim);
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        const std::int64_t row = static_cast<std::int64_t>(i) * N + j;
        const double x[2] = {grid.coord(i), grid.coord(j)};
        const double v = V.evaluator(std::span<const double>(x, 2));
        H.potential_on_grid[row] = v;
        trip.emplace_back(row, row, 4.0 * kin + v);
        if (j > 0) trip.emplace_back(row, row - 1, -kin);
        if (j + 1 < N) trip.emplace_back(row, row + 1, -kin);
        if (i > 0) trip.emplace_back(row, row - N, -kin);
        if (i + 1 < N) trip.emplace_back(row, row + N, -kin);
      }
    }
  }
  H.matrix.resize(dim, dim);
  H.matrix.setFromTriplets(trip.begin(), trip.end());
  H.matrix.makeCompressed();
  return H;
}

AdequacyReport adequacy_check(const DiscreteHamiltonian& H, double lam_target) {
  AdequacyReport rep;
  rep.boundary_required = 3.0 * lam_target;
  rep.resolution_value = H.grid.spacing() * H.grid.spacing() * lam_target;

  const int N = H.grid.points_per_axis;
  double vmin = std::numeric_limits<double>::infinity();
  if (H.grid.dim == 1) {
    vmin = std::min(H.potential_on_grid.front(), H.potential_on_grid.back());
  } else {
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        if (i != 0 && i != N - 1 && j != 0 && j != N - 1) continue;
        vmin = std::min(vmin, H.potential_on_grid[static_cast<std::int64_t>(i) * N + j]);
      }
    }
  }
  rep.boundary_min_V = vmin;
  rep.boundary_ok = vmin >= rep.boundary_required;
  rep.resolution_ok = rep.resolution_value <= rep.resolution_limit;
  rep.pass = rep.boundary_ok && rep.resolution_ok;
  return rep;
}

}  // namespace weyllab
