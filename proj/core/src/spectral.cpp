#include "weyllab/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "weyllab/numerics.hpp"
#include "weyllab/rng.hpp"

namespace weyllab {

namespace {

constexpr double kResidualTol = 1e-8;
constexpr double kRichardsonTol = 1e-2;

void validate_residuals(const Eigen::SparseMatrix<double>& H, const Eigen::MatrixXd& vecs,
                        const std::vector<double>& vals) {
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const Eigen::VectorXd v = vecs.col(static_cast<Eigen::Index>(i));
    const double resid = (H * v - vals[i] * v).norm() / v.norm();
    if (!(resid <= kResidualTol * std::max(1.0, std::fabs(vals[i]))))
      throw ConvergenceFailure("eigenpair " + std::to_string(i) + " residual " +
                               std::to_string(resid) + " exceeds tolerance");
  }
}

std::vector<double> solve_lowest_dense(const Eigen::SparseMatrix<double>& H, int k) {
  const Eigen::MatrixXd dense(H);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  if (es.info() != Eigen::Success) throw ConvergenceFailure("dense eigensolver failed");
  std::vector<double> vals(es.eigenvalues().data(), es.eigenvalues().data() + k);
  validate_residuals(H, es.eigenvectors().leftCols(k), vals);
  return vals;
}

// Shift-invert Krylov-Schur with full reorthogonalization. Finds the k
// largest eigenvalues of (H + tau I)^{-1}, i.e. the k smallest of H.
std::vector<double> solve_lowest_krylov(const Eigen::SparseMatrix<double>& H, int k) {
  const Eigen::Index dim = H.rows();

  // Gershgorin lower bound keeps the shifted operator positive definite.
  double lower = 0.0;
  for (Eigen::Index c = 0; c < H.outerSize(); ++c) {
    double diag = 0.0, off = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(H, c); it; ++it) {
      if (it.row() == c)
        diag = it.value();
      else
        off += std::fabs(it.value());
    }
    lower = std::min(lower, diag - off);
  }
  const double tau = 1.0 - std::min(0.0, lower);

  Eigen::SparseMatrix<double> A = H;
  for (Eigen::Index i = 0; i < dim; ++i) A.coeffRef(i, i) += tau;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw ConvergenceFailure("sparse LDLT factorization failed in shift-invert solver");

  const int m = std::min<Eigen::Index>(dim, 2 * k + 40);
  Eigen::MatrixXd V(dim, m + 1);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m + 1, m + 1);

  Rng rng(0x6b7970ull);
  for (Eigen::Index i = 0; i < dim; ++i) V(i, 0) = rng.uniform() - 0.5;
  V.col(0).normalize();

  int p = 0;  // locked/restarted leading block size
  std::vector<double> theta;
  Eigen::MatrixXd Y;

  const int max_restarts = 300;
  for (int restart = 0; restart <= max_restarts; ++restart) {
    // expand the basis from p to m with CGS2 reorthogonalization
    int j = p;
    double beta = 0.0;
    for (; j < m; ++j) {
      Eigen::VectorXd w = ldlt.solve(V.col(j));
      const double norm_in = w.norm();
      Eigen::VectorXd coef = V.leftCols(j + 1).transpose() * w;
      w.noalias() -= V.leftCols(j + 1) * coef;
      // re-orthogonalize only on substantial cancellation (Kahan-Parlett)
      if (w.norm() < 0.707 * norm_in) {
        const Eigen::VectorXd coef2 = V.leftCols(j + 1).transpose() * w;
        w.noalias() -= V.leftCols(j + 1) * coef2;
        coef += coef2;
      }
      S.col(j).head(j + 1) = coef;
      S.row(j).head(j + 1) = coef.transpose();
      beta = w.norm();
      if (beta < 1e-14) break;  // invariant subspace reached
      S(j + 1, j) = beta;
      S(j, j + 1) = beta;
      V.col(j + 1) = w / beta;
    }
    const int used = j;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(S.topLeftCorner(used, used));
    if (small.info() != Eigen::Success) throw ConvergenceFailure("projected eigensolve failed");

    // order Ritz values descending (largest of the inverse operator first)
    std::vector<int> order(used);
    for (int i = 0; i < used; ++i) order[i] = used - 1 - i;

    theta.assign(used, 0.0);
    Y.resize(used, used);
    for (int i = 0; i < used; ++i) {
      theta[i] = small.eigenvalues()(order[i]);
      Y.col(i) = small.eigenvectors().col(order[i]);
    }

    const double tol = 1e-13 * std::max(std::fabs(theta.front()), 1e-30);
    bool converged = used >= k && beta >= 0.0;
    for (int i = 0; i < k && converged; ++i)
      if (std::fabs(beta * Y(used - 1, i)) > tol) converged = false;

    if (converged || beta < 1e-14 || restart == max_restarts) {
      if (!converged && beta >= 1e-14)
        throw ConvergenceFailure("Krylov-Schur did not converge within restart budget");
      break;
    }

    // thick restart: keep the leading ell Ritz vectors plus the residual
    // vector, leaving at least m - ell fresh directions per cycle
    const int ell = std::min(used - 1, k + std::min(40, (m - k) / 2));
    Eigen::MatrixXd compact = V.leftCols(used) * Y.leftCols(ell);
    V.leftCols(ell) = compact;
    V.col(ell) = V.col(used);  // residual direction v_{m+1}
    S.setZero();
    for (int i = 0; i < ell; ++i) {
      S(i, i) = theta[i];
      S(ell, i) = beta * Y(used - 1, i);
      S(i, ell) = S(ell, i);
    }
    p = ell;
  }

  const int used = static_cast<int>(theta.size());
  if (used < k) throw ConvergenceFailure("Krylov basis exhausted before k eigenvalues");

  // theta descending in the inverse operator maps to lambda ascending
  std::vector<double> vals(k);
  Eigen::MatrixXd vecs = V.leftCols(used) * Y.leftCols(k);
  for (int i = 0; i < k; ++i) vals[i] = 1.0 / theta[i] - tau;
  validate_residuals(H, vecs, vals);
  return vals;
}

std::vector<double> solve_lowest(const Eigen::SparseMatrix<double>& H, int k) {
  if (H.rows() <= 2000) return solve_lowest_dense(H, k);
  return solve_lowest_krylov(H, k);
}

GridSpec companion_grid_for(const GridSpec& base) {
  GridSpec refined = base;
  refined.points_per_axis = 2 * base.points_per_axis + 1;  // nested halving of h
  if (refined.size() <= 250000) return refined;
  GridSpec coarse = base;  // halving memory instead; the error bound is conservative
  coarse.points_per_axis = std::max(16, (base.points_per_axis - 1) / 2);
  return coarse;
}

std::function<double(double)> make_weyl_proxy(const DiscreteHamiltonian& H) {
  auto sorted = std::make_shared<std::vector<double>>(H.potential_on_grid);
  std::sort(sorted->begin(), sorted->end());
  const int n = H.grid.dim;
  const double cell = std::pow(H.grid.spacing(), n);
  const double prefactor = std::pow(2.0 * kPi, -n) * unit_ball_volume(n) /
                           std::pow(H.hbar, n);
  const double power = 0.5 * n;
  return [sorted, cell, prefactor, power](double lam) {
    double acc = 0.0;
    for (const double v : *sorted) {
      if (v >= lam) break;
      acc += std::pow(lam - v, power);
    }
    return prefactor * cell * acc;
  };
}

}  // namespace

Spectrum eigen_lowest(const DiscreteHamiltonian& H, int k) {
  if (k < 1) throw InvalidParameters("eigen_lowest requires k >= 1");
  if (k > H.dimension() / 4)
    throw InvalidParameters("eigen_lowest requires k <= dimension/4 (" +
                            std::to_string(H.dimension() / 4) + "), got " + std::to_string(k));

  Spectrum s;
  s.hbar = H.hbar;
  s.base_grid = H.grid;
  s.eigenvalues = solve_lowest(H.matrix, k);

  if (!H.potential) throw InvalidParameters("Hamiltonian carries no potential for validation");
  s.companion_grid = companion_grid_for(H.grid);
  const DiscreteHamiltonian companion = build(*H.potential, s.companion_grid, H.hbar);
  const std::vector<double> check = solve_lowest(companion.matrix, k);

  int trusted = 0;
  for (int i = 0; i < k; ++i) {
    const double denom = std::max(std::fabs(s.eigenvalues[i]), 1e-12);
    if (std::fabs(s.eigenvalues[i] - check[i]) / denom >= kRichardsonTol) break;
    trusted = i + 1;
  }
  if (trusted == 0)
    throw TrustWindowEmpty("no eigenvalue passed the two-grid Richardson comparison");
  s.lambda_trust = s.eigenvalues[trusted - 1];
  s.weyl_proxy = make_weyl_proxy(H);
  return s;
}

int counting(const Spectrum& s, double lam) {
  if (lam > s.lambda_trust)
    throw UntrustedRange("counting at lambda = " + std::to_string(lam) +
                         " above lambda_trust = " + std::to_string(s.lambda_trust));
  return static_cast<int>(std::lower_bound(s.eigenvalues.begin(), s.eigenvalues.end(), lam) -
                          s.eigenvalues.begin());
}

int counting_interval(const Spectrum& s, double a, double b) {
  if (!(a < b)) throw InvalidParameters("counting_interval requires a < b");
  if (b > s.lambda_trust)
    throw UntrustedRange("counting_interval endpoint " + std::to_string(b) +
                         " above lambda_trust = " + std::to_string(s.lambda_trust));
  const auto lo = std::upper_bound(s.eigenvalues.begin(), s.eigenvalues.end(), a);
  const auto hi = std::lower_bound(s.eigenvalues.begin(), s.eigenvalues.end(), b);
  return static_cast<int>(hi - lo);
}

HeatTraceValue heat_trace(const Spectrum& s, double t) {
  if (!(t > 0.0)) throw InvalidParameters("heat_trace requires t > 0");
  HeatTraceValue out;
  KahanSum acc;
  for (auto it = s.eigenvalues.rbegin(); it != s.eigenvalues.rend(); ++it) {
    if (*it > s.lambda_trust) continue;
    acc.add(std::exp(-t * *it));
  }
  out.value = acc.value();

  // bound the omitted tail with the Weyl-prediction counting proxy, falling
  // back to a power-law fit of the computed counting function
  std::function<double(double)> proxy = s.weyl_proxy;
  if (!proxy) {
    const double lamT = s.lambda_trust;
    const double nT = static_cast<double>(
        std::lower_bound(s.eigenvalues.begin(), s.eigenvalues.end(), lamT) -
        s.eigenvalues.begin());
    double slope = 1.0;
    const double lam_half = 0.5 * lamT;
    const double n_half = static_cast<double>(
        std::lower_bound(s.eigenvalues.begin(), s.eigenvalues.end(), lam_half) -
        s.eigenvalues.begin());
    if (n_half > 0.0 && nT > n_half) slope = std::log(nT / n_half) / std::log(2.0);
    proxy = [lamT, nT, slope](double lam) {
      return lam <= lamT ? nT : nT * std::pow(lam / lamT, slope);
    };
  }
  KahanSum tail;
  double lo = s.lambda_trust;
  double n_lo = proxy(lo);
  for (int block = 0; block < 4000; ++block) {
    const double hi = lo * 1.05;
    const double n_hi = proxy(hi);
    const double term = std::exp(-t * lo) * std::max(0.0, n_hi - n_lo);
    tail.add(term);
    lo = hi;
    n_lo = n_hi;
    if (block > 16 && term < 1e-18 * std::max(out.value, tail.value())) break;
  }
  out.tail_bound = tail.value();
  out.tail_certified = out.tail_bound < 1e-3 * out.value;
  return out;
}

StieltjesMeasure spectrum_measure(const Spectrum& s) {
  std::vector<Atom> atoms;
  atoms.reserve(s.eigenvalues.size());
  for (const double lam : s.eigenvalues) {
    if (lam > s.lambda_trust) break;
    atoms.push_back({lam, 1.0});
  }
  return StieltjesMeasure::from_atoms(std::move(atoms), "spectrum(hbar=" + std::to_string(s.hbar) + ")");
}

Spectrum spectrum_from_values(std::vector<double> eigenvalues, double hbar, double lambda_trust) {
  std::sort(eigenvalues.begin(), eigenvalues.end());
  Spectrum s;
  s.eigenvalues = std::move(eigenvalues);
  s.hbar = hbar;
  s.lambda_trust = lambda_trust;
  return s;
}

void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
  os << "index,eigenvalue,trusted\n";
  os.precision(17);
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
    os << i << "," << s.eigenvalues[i] << "," << (s.eigenvalues[i] <= s.lambda_trust ? 1 : 0)
       << "\n";
}

Spectrum read_spectrum_csv(std::istream& is, double hbar) {
  std::vector<double> vals;
  double trust = -std::numeric_limits<double>::infinity();
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || !(std::isdigit(line[0]) || line[0] == '-')) continue;
    std::istringstream row(line);
    std::string idx, val, trusted;
    if (!std::getline(row, idx, ',') || !std::getline(row, val, ',') ||
        !std::getline(row, trusted))
      throw ConfigError("spectrum CSV: malformed line '" + line + "'");
    const double lam = std::stod(val);
    vals.push_back(lam);
    if (std::stoi(trusted) != 0) trust = std::max(trust, lam);
  }
  if (vals.empty()) throw ConfigError("spectrum CSV: no rows");
  return spectrum_from_values(std::move(vals), hbar, trust);
}

}  // namespace weyllab
