#include "weyllab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "weyllab/numerics.hpp"

namespace weyllab {

namespace {

// Index of the last abscissa <= lam, or -1.
template <class Getter>
std::ptrdiff_t last_leq(std::size_t n, double lam, const Getter& pos) {
  std::ptrdiff_t lo = 0, hi = static_cast<std::ptrdiff_t>(n) - 1, ans = -1;
  while (lo <= hi) {
    const std::ptrdiff_t mid = lo + (hi - lo) / 2;
    if (pos(mid) <= lam) {
      ans = mid;
      lo = mid + 1;
    } else {
      hi = mid - 1;
    }
  }
  return ans;
}

}  // namespace

StieltjesMeasure StieltjesMeasure::from_atoms(std::vector<Atom> atoms, std::string label) {
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.position < b.position; });
  std::vector<Atom> merged;
  merged.reserve(atoms.size());
  for (const Atom& a : atoms) {
    if (!(a.position >= 0.0) || !std::isfinite(a.position))
      throw InvalidParameters("atom positions must be finite and nonnegative");
    if (!(a.weight > 0.0) || !std::isfinite(a.weight))
      throw InvalidParameters("atom weights must be finite and positive");
    if (!merged.empty() && merged.back().position == a.position)
      merged.back().weight += a.weight;
    else
      merged.push_back(a);
  }
  StieltjesMeasure m;
  m.atomic_ = true;
  m.atoms_ = std::move(merged);
  m.label_ = std::move(label);
  return m;
}

StieltjesMeasure StieltjesMeasure::from_cdf(std::vector<double> abscissae,
                                            std::vector<double> cumulative, std::string label) {
  if (abscissae.size() != cumulative.size() || abscissae.size() < 2)
    throw InvalidParameters("SampledCDF needs >= 2 matching abscissa/cumulative pairs");
  for (std::size_t i = 0; i < abscissae.size(); ++i) {
    if (!std::isfinite(abscissae[i]) || !(abscissae[i] >= 0.0))
      throw InvalidParameters("SampledCDF abscissae must be finite and nonnegative");
    if (!std::isfinite(cumulative[i]) || !(cumulative[i] >= 0.0))
      throw InvalidParameters("SampledCDF cumulative values must be finite and nonnegative");
    if (i > 0 && !(abscissae[i] > abscissae[i - 1]))
      throw InvalidParameters("SampledCDF abscissae must be strictly increasing");
    if (i > 0 && cumulative[i] < cumulative[i - 1])
      throw InvalidParameters("SampledCDF cumulative array must be nondecreasing");
  }
  StieltjesMeasure m;
  m.atomic_ = false;
  m.abscissae_ = std::move(abscissae);
  m.cdf_ = std::move(cumulative);
  m.label_ = std::move(label);
  return m;
}

const std::vector<Atom>& StieltjesMeasure::atoms() const {
  if (!atomic_) throw InvalidParameters("measure is not atomic");
  return atoms_;
}

const std::vector<double>& StieltjesMeasure::abscissae() const {
  if (atomic_) throw InvalidParameters("measure is not a SampledCDF");
  return abscissae_;
}

const std::vector<double>& StieltjesMeasure::cdf_values() const {
  if (atomic_) throw InvalidParameters("measure is not a SampledCDF");
  return cdf_;
}

double StieltjesMeasure::total_mass() const {
  if (atomic_) {
    KahanSum s;
    for (const Atom& a : atoms_) s.add(a.weight);
    return s.value();
  }
  return cdf_.back();
}

double StieltjesMeasure::support_min() const {
  if (atomic_) return atoms_.empty() ? 0.0 : atoms_.front().position;
  // the first abscissa with mass strictly above zero bounds the support below
  for (std::size_t i = 0; i < cdf_.size(); ++i)
    if (cdf_[i] > 0.0) return i == 0 ? abscissae_[0] : abscissae_[i - 1];
  return abscissae_.back();
}

double StieltjesMeasure::support_max() const {
  if (atomic_) return atoms_.empty() ? 0.0 : atoms_.back().position;
  return abscissae_.back();
}

StieltjesMeasure StieltjesMeasure::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw InvalidParameters("scale factor must be finite and positive");
  StieltjesMeasure m = *this;
  for (Atom& a : m.atoms_) a.weight *= factor;
  for (double& c : m.cdf_) c *= factor;
  return m;
}

double cumulative(const StieltjesMeasure& m, double lam) {
  if (m.is_atomic()) {
    const auto& atoms = m.atoms();
    KahanSum s;
    for (const Atom& a : atoms) {
      if (a.position > lam) break;
      s.add(a.weight);
    }
    return s.value();
  }
  const auto& x = m.abscissae();
  const auto& c = m.cdf_values();
  if (lam < x.front()) return 0.0;
  if (lam >= x.back()) return c.back();
  const auto i = static_cast<std::size_t>(
      last_leq(x.size(), lam, [&](std::ptrdiff_t j) { return x[j]; }));
  if (x[i] == lam || i + 1 >= x.size()) return c[i];
  const double frac = (lam - x[i]) / (x[i + 1] - x[i]);
  return c[i] + frac * (c[i + 1] - c[i]);
}

double interval_mass(const StieltjesMeasure& m, double a, double b) {
  if (!(a < b)) throw InvalidParameters("interval_mass requires a < b");
  if (m.is_atomic()) {
    KahanSum s;
    for (const Atom& at : m.atoms()) {
      if (at.position <= a) continue;
      if (at.position >= b) break;
      s.add(at.weight);
    }
    return s.value();
  }
  // linear-interpolation CDF is continuous above the first abscissa, so the
  // open/closed distinction only matters at the leading atom
  double lo = cumulative(m, a);
  if (a < m.abscissae().front() && b > m.abscissae().front()) lo = 0.0;
  double hi = b <= m.abscissae().front() ? 0.0 : cumulative(m, b);
  return std::max(0.0, hi - lo);
}

double laplace(const StieltjesMeasure& m, double t) {
  if (!(t > 0.0)) throw NonIntegrable("laplace transform requires t > 0");
  if (m.is_atomic()) {
    const auto& atoms = m.atoms();
    KahanSum s;
    // descending positions: accumulate small terms first
    for (auto it = atoms.rbegin(); it != atoms.rend(); ++it)
      s.add(it->weight * std::exp(-t * it->position));
    return s.value();
  }
  const auto& x = m.abscissae();
  const auto& c = m.cdf_values();
  KahanSum s;
  s.add(c[0] * std::exp(-t * x[0]));  // mass sitting at the first abscissa
  const double total = c.back();
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double dm = c[i + 1] - c[i];
    if (dm <= 0.0) continue;
    const double dx = x[i + 1] - x[i];
    // int_{x_i}^{x_{i+1}} e^{-tr} (dm/dx) dr, stably via expm1
    const double cell = (dm / dx) * std::exp(-t * x[i]) * (-std::expm1(-t * dx)) / t;
    s.add(cell);
    // certified remainder: e^{-t x_{i+1}} * (mass not yet integrated)
    const double remainder = std::exp(-t * x[i + 1]) * (total - c[i + 1]);
    if (remainder < 1e-14 * s.value()) break;
  }
  if (!std::isfinite(s.value()))
    throw QuadratureFailure("laplace transform of SampledCDF did not evaluate finitely");
  return s.value();
}

double fractional_avg(const StieltjesMeasure& m, FractionalIndex alpha, double s) {
  const double a = alpha.alpha;
  const double norm = gamma_alpha_plus_one(a);  // throws outside (0, 50]
  if (!(s >= 0.0)) throw InvalidParameters("fractional_avg requires s >= 0");
  if (m.is_atomic()) {
    KahanSum acc;
    for (const Atom& at : m.atoms()) {
      if (at.position > s) break;
      acc.add(at.weight * std::pow(s - at.position, a));
    }
    return acc.value() / norm;
  }
  const auto& x = m.abscissae();
  const auto& c = m.cdf_values();
  if (s < x.front()) return 0.0;
  KahanSum acc;
  acc.add(c[0] * std::pow(s - x[0], a));
  for (std::size_t i = 0; i + 1 < x.size() && x[i] < s; ++i) {
    const double dm = c[i + 1] - c[i];
    if (dm <= 0.0) continue;
    const double hi = std::min(x[i + 1], s);
    const double rho = dm / (x[i + 1] - x[i]);
    // int_{x_i}^{hi} (s-r)^a rho dr
    acc.add(rho * (std::pow(s - x[i], a + 1.0) - std::pow(s - hi, a + 1.0)) / (a + 1.0));
  }
  return acc.value() / norm;
}

double fractional_interval(const StieltjesMeasure& m, FractionalIndex alpha, double a, double b) {
  if (!(a >= 0.0) || !(a < b)) throw InvalidParameters("fractional_interval requires 0 <= a < b");
  if (alpha.alpha == 0.0) return interval_mass(m, a, b);
  const double al = alpha.alpha;
  const double norm = al * gamma_of(al);  // alpha * Gamma(alpha), checks range
  auto bracket = [&](double p) {
    return std::pow(positive_part(b - p), al) - std::pow(positive_part(a - p), al);
  };
  if (m.is_atomic()) {
    KahanSum acc;
    for (const Atom& at : m.atoms()) {
      if (at.position >= b) break;
      acc.add(at.weight * bracket(at.position));
    }
    return acc.value() / norm;
  }
  const auto& x = m.abscissae();
  const auto& c = m.cdf_values();
  if (b <= x.front()) return 0.0;
  KahanSum acc;
  acc.add(c[0] * bracket(x[0]));
  auto anti = [&](double lim, double p) {  // int (lim - r)_+^al dr antiderivative helper
    return std::pow(positive_part(lim - p), al + 1.0) / (al + 1.0);
  };
  for (std::size_t i = 0; i + 1 < x.size() && x[i] < b; ++i) {
    const double dm = c[i + 1] - c[i];
    if (dm <= 0.0) continue;
    const double rho = dm / (x[i + 1] - x[i]);
    const double hi = std::min(x[i + 1], b);
    const double cell = (anti(b, x[i]) - anti(b, hi)) - (anti(a, x[i]) - anti(a, hi));
    acc.add(rho * cell);
  }
  return acc.value() / norm;
}

double doubling_estimate(const StieltjesMeasure& m, double s0, double s_max,
                         int points_per_decade) {
  if (!(s0 > 0.0) || !(s0 < s_max)) throw InvalidParameters("doubling_estimate requires 0 < s0 < s_max");
  if (!(cumulative(m, s0) > 0.0))
    throw EmptyMeasure("doubling_estimate: no mass at or below s0 = " + std::to_string(s0));
  const auto grid = geometric_grid(s0, 0.5 * s_max, points_per_decade);
  double worst = 0.0;
  for (const double s : grid) {
    const double denom = cumulative(m, s);
    if (denom <= 0.0) continue;
    worst = std::max(worst, cumulative(m, 2.0 * s) / denom);
  }
  return worst;
}

double tail_ratio(const StieltjesMeasure& m, double b, double t) {
  if (!(b > 0.0) || !(t > 0.0)) throw InvalidParameters("tail_ratio requires b > 0, t > 0");
  const double split = b / t;
  double head = 0.0, tail = 0.0;
  if (m.is_atomic()) {
    KahanSum h, tl;
    for (const Atom& at : m.atoms()) {
      const double term = at.weight * std::exp(-t * at.position);
      if (at.position <= split)
        h.add(term);
      else
        tl.add(term);
    }
    head = h.value();
    tail = tl.value();
  } else {
    const auto& x = m.abscissae();
    const auto& c = m.cdf_values();
    KahanSum h, tl;
    if (x[0] <= split)
      h.add(c[0] * std::exp(-t * x[0]));
    else
      tl.add(c[0] * std::exp(-t * x[0]));
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double dm = c[i + 1] - c[i];
      if (dm <= 0.0) continue;
      const double rho = dm / (x[i + 1] - x[i]);
      auto piece = [&](double lo, double hi) {
        if (!(hi > lo)) return 0.0;
        return rho * std::exp(-t * lo) * (-std::expm1(-t * (hi - lo))) / t;
      };
      h.add(piece(x[i], std::min(x[i + 1], split)));
      tl.add(piece(std::max(x[i], split), x[i + 1]));
    }
    head = h.value();
    tail = tl.value();
  }
  if (!(head > 0.0)) throw EmptyHead("tail_ratio: head integral vanishes at split " + std::to_string(split));
  return tail / head;
}

StieltjesMeasure staircase_nu(int levels) {
  if (levels < 2) throw InvalidParameters("staircase_nu requires K >= 2");
  const double sqrt2 = std::sqrt(2.0);
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(levels) + 1);
  double prev = 0.0;
  for (int k = 0; k <= levels; ++k) {
    // value of nu on (2^{k-1}, 2^k]
    const double level = (k % 2 == 0 ? 1.0 : sqrt2) * std::ldexp(1.0, k - 1);
    atoms.push_back({std::ldexp(1.0, k - 1), level - prev});
    prev = level;
  }
  return StieltjesMeasure::from_atoms(std::move(atoms), "staircase-nu-K" + std::to_string(levels));
}

StieltjesMeasure fractional_measure(const StieltjesMeasure& m, FractionalIndex alpha,
                                    double s_min, double s_max, int points_per_decade) {
  if (!(s_min > 0.0) || !(s_min < s_max))
    throw InvalidParameters("fractional_measure requires 0 < s_min < s_max");
  std::vector<double> grid = geometric_grid(s_min, s_max, points_per_decade);
  if (m.is_atomic()) {
    // knots at every atom plus a geometric ladder of offsets above it, at the
    // grid's per-decade density: (s - r)^alpha has unbounded curvature at the
    // kink, and Laplace probes resolve it at scales far below the grid spacing
    const double ratio = std::pow(10.0, 1.0 / points_per_decade);
    for (const Atom& at : m.atoms()) {
      const double p = at.position;
      if (p < s_min || p >= s_max) continue;
      grid.push_back(p);
      for (double eta = 1e-8; eta <= 1.0; eta *= ratio) {
        const double q = p * (1.0 + eta);
        if (q < s_max) grid.push_back(q);
      }
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) { return b - a <= 1e-15 * b; }),
             grid.end());
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    values[i] = fractional_avg(m, alpha, grid[i]);
    if (i > 0 && values[i] < values[i - 1]) values[i] = values[i - 1];  // clip roundoff
  }
  return StieltjesMeasure::from_cdf(std::move(grid), std::move(values),
                                    m.label() + "^" + std::to_string(alpha.alpha));
}

void write_measure(std::ostream& os, const StieltjesMeasure& m) {
  os.precision(17);
  if (m.is_atomic()) {
    os << "atoms\n";
    for (const Atom& a : m.atoms()) os << a.position << "," << a.weight << "\n";
  } else {
    os << "cdf\n";
    const auto& x = m.abscissae();
    const auto& c = m.cdf_values();
    for (std::size_t i = 0; i < x.size(); ++i) os << x[i] << "," << c[i] << "\n";
  }
}

StieltjesMeasure read_measure(std::istream& is, std::string label) {
  std::string header;
  if (!std::getline(is, header)) throw ConfigError("measure file: missing header line");
  while (!header.empty() && (header.back() == '\r' || header.back() == ' ')) header.pop_back();
  if (header != "atoms" && header != "cdf")
    throw ConfigError("measure file: header must be 'atoms' or 'cdf', got '" + header + "'");
  std::vector<double> first, second;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ConfigError("measure file: expected 'position,value', got '" + line + "'");
    try {
      first.push_back(std::stod(line.substr(0, comma)));
      second.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ConfigError("measure file: unparsable line '" + line + "'");
    }
  }
  if (header == "atoms") {
    std::vector<Atom> atoms(first.size());
    for (std::size_t i = 0; i < first.size(); ++i) atoms[i] = {first[i], second[i]};
    return StieltjesMeasure::from_atoms(std::move(atoms), std::move(label));
  }
  return StieltjesMeasure::from_cdf(std::move(first), std::move(second), std::move(label));
}

}  // namespace weyllab
