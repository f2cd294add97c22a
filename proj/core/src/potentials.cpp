#include "weyllab/potentials.hpp"

#include <algorithm>
#include <cmath>

#include "weyllab/numerics.hpp"
#include "weyllab/quadrature.hpp"

namespace weyllab {

namespace {

double norm_of(std::span<const double> x) {
  double s = 0.0;
  for (double xi : x) s += xi * xi;
  return std::sqrt(s);
}

Stratum make_box_stratum(int dim, double radius) {
  Stratum s;
  s.volume = std::pow(2.0 * radius, dim);
  s.sample = [dim, radius](Rng& rng, std::span<double> x) {
    for (int i = 0; i < dim; ++i) x[i] = rng.uniform(-radius, radius);
  };
  s.contains = [radius](std::span<const double> x) {
    for (double xi : x)
      if (std::fabs(xi) > radius) return false;
    return true;
  };
  return s;
}

// Uniform draw from the n-ball of radius R.
void sample_ball(Rng& rng, std::span<double> x, double R) {
  const int n = static_cast<int>(x.size());
  rng.unit_sphere(x);
  const double r = R * std::pow(rng.uniform(), 1.0 / n);
  for (auto& xi : x) xi *= r;
}

struct StratifiedResult {
  double value = 0.0;
  double variance = 0.0;     // of the estimator
  std::size_t hits = 0;      // samples with nonzero integrand
  std::size_t total = 0;
};

// E = sum_s vol_s * mean_s( f * 1{owned by s} ); samples allocated by volume
// share with a floor so every stratum is resolved.
StratifiedResult stratified_integral(const Potential& V, const std::vector<Stratum>& strata,
                                     const std::function<double(std::span<const double>)>& f,
                                     std::size_t samples, std::uint64_t seed) {
  StratifiedResult out;
  double total_volume = 0.0;
  for (const auto& s : strata) total_volume += s.volume;
  if (!(total_volume > 0.0)) throw InvalidParameters("stratified_integral: empty strata");

  std::vector<double> x(V.dim);
  for (std::size_t si = 0; si < strata.size(); ++si) {
    const Stratum& st = strata[si];
    const auto share = static_cast<std::size_t>(samples * (st.volume / total_volume));
    const std::size_t n = std::max<std::size_t>(share, std::min<std::size_t>(samples, 1000));
    Rng rng(derive_seed(seed, si));
    KahanSum sum, sumsq;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      st.sample(rng, x);
      bool owned = true;
      for (std::size_t sj = 0; sj < si; ++sj) {
        if (strata[sj].contains(x)) {
          owned = false;
          break;
        }
      }
      double fx = 0.0;
      if (owned) fx = f(x);
      if (fx != 0.0) ++hits;
      sum.add(fx);
      sumsq.add(fx * fx);
    }
    const double mean = sum.value() / static_cast<double>(n);
    const double var =
        std::max(0.0, sumsq.value() / static_cast<double>(n) - mean * mean);
    out.value += st.volume * mean;
    out.variance += st.volume * st.volume * var / static_cast<double>(n);
    out.hits += hits;
    out.total += n;
  }
  return out;
}

}  // namespace

double Potential::bounding_radius(double lam) const {
  if (!growth_envelope) throw InvalidParameters("potential has no growth envelope");
  double lo = 0.0, hi = 1e-6;
  int guard = 0;
  while (growth_envelope(hi) < lam) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 4000) throw InvalidParameters("growth envelope does not reach lambda");
  }
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (growth_envelope(mid) < lam)
      lo = mid;
    else
      hi = mid;
  }
  return 2.0 * hi;  // doubled for safety
}

std::vector<Stratum> Potential::strata_for(double lam) const {
  if (strata_factory) return strata_factory(lam);
  return {make_box_stratum(dim, bounding_radius(lam))};
}

Potential make_power(int dim, double kappa) {
  if (dim < 1 || !(kappa > 0.0)) throw InvalidParameters("make_power requires dim >= 1, kappa > 0");
  Potential V;
  V.dim = dim;
  V.evaluator = [kappa](std::span<const double> x) { return std::pow(norm_of(x), kappa); };
  V.growth_envelope = [kappa](double rho) { return std::pow(rho, kappa); };
  const double omega = unit_ball_volume(dim);
  V.analytic_sigma = [omega, dim, kappa](double lam) {
    return lam <= 0.0 ? 0.0 : omega * std::pow(lam, static_cast<double>(dim) / kappa);
  };
  V.label = "power(n=" + std::to_string(dim) + ",kappa=" + std::to_string(kappa) + ")";
  return V;
}

Potential make_rozenbljum(double theta, double kappa1, double kappa2, int dim) {
  const int n = dim;
  if (n < 2) throw InvalidParameters("rozenbljum potential requires dim >= 2");
  if (!(theta > 0.0 && kappa1 > 0.0 && kappa2 > 0.0))
    throw InvalidParameters("rozenbljum potential requires positive theta, kappa1, kappa2");
  if (!(1.0 / (n - 1) > theta))
    throw InvalidParameters("constraint 1/(n-1) > theta violated: 1/(n-1) = " +
                            std::to_string(1.0 / (n - 1)) + ", theta = " + std::to_string(theta));
  if (!(theta > 0.5 * kappa1))
    throw InvalidParameters("constraint theta > kappa1/2 violated: theta = " +
                            std::to_string(theta) + ", kappa1/2 = " + std::to_string(0.5 * kappa1));
  if (!((1.0 - theta * (n - 1)) / kappa2 > n / kappa1))
    throw InvalidParameters("constraint (1-theta(n-1))/kappa2 > n/kappa1 violated: " +
                            std::to_string((1.0 - theta * (n - 1)) / kappa2) + " <= " +
                            std::to_string(n / kappa1));
  if (!(kappa1 < 1.0))
    throw InvalidParameters("constraint kappa1 < 1 violated: kappa1 = " + std::to_string(kappa1));

  auto in_cusp = [theta, n](std::span<const double> x) {
    const double s = x[n - 1];
    if (s <= 1.0) return false;
    double xp2 = 0.0;
    for (int i = 0; i < n - 1; ++i) xp2 += x[i] * x[i];
    return std::sqrt(xp2) < std::pow(s, -theta);
  };

  Potential V;
  V.dim = n;
  V.evaluator = [in_cusp, kappa1, kappa2](std::span<const double> x) {
    const double r = norm_of(x);
    return std::pow(r, in_cusp(x) ? kappa2 : kappa1);
  };
  V.growth_envelope = [kappa1, kappa2](double rho) {
    return std::min(std::pow(rho, kappa1), std::pow(rho, kappa2));
  };
  V.label = "rozenbljum(theta=" + std::to_string(theta) + ",k1=" + std::to_string(kappa1) +
            ",k2=" + std::to_string(kappa2) + ",n=" + std::to_string(n) + ")";

  // Omega_lam decomposes exactly into the kappa1-ball plus the cusp strip up
  // to s = lam^{1/kappa2}; uniform draws in each are closed-form.
  V.strata_factory = [theta, kappa1, kappa2, n, in_cusp](double lam) {
    std::vector<Stratum> strata;
    const double ball_radius = std::pow(std::max(lam, 1e-12), 1.0 / kappa1);
    Stratum ball;
    ball.volume = unit_ball_volume(n) * std::pow(ball_radius, n);
    ball.sample = [ball_radius](Rng& rng, std::span<double> x) { sample_ball(rng, x, ball_radius); };
    ball.contains = [ball_radius](std::span<const double> x) { return norm_of(x) <= ball_radius; };
    strata.push_back(std::move(ball));

    const double S = std::pow(std::max(lam, 1.0), 1.0 / kappa2);
    if (S > 1.0) {
      const double gamma = 1.0 - theta * (n - 1);  // > 0 by the constraints
      const double cross = unit_ball_volume(n - 1);
      Stratum strip;
      strip.volume = cross * (std::pow(S, gamma) - 1.0) / gamma;
      strip.sample = [theta, gamma, S, n](Rng& rng, std::span<double> x) {
        // s has density prop. to the cross-section s^{-theta(n-1)}; together
        // with x' uniform in the cross-section this is uniform in the strip
        const double u = rng.uniform();
        const double s = std::pow(1.0 + u * (std::pow(S, gamma) - 1.0), 1.0 / gamma);
        const double w = std::pow(s, -theta);
        if (n == 2) {
          x[0] = rng.uniform(-w, w);
        } else {
          sample_ball(rng, x.subspan(0, n - 1), w);
        }
        x[n - 1] = s;
      };
      strip.contains = [in_cusp, S, n](std::span<const double> x) {
        return in_cusp(x) && x[n - 1] < S;
      };
      strata.push_back(std::move(strip));
    }
    return strata;
  };
  return V;
}

MCValue sigma(const Potential& V, double lam, const MonteCarloConfig& mc) {
  if (V.analytic_sigma) return {(*V.analytic_sigma)(lam), 0.0};
  const auto strata = V.strata_for(lam);
  const auto res = stratified_integral(
      V, strata, [&](std::span<const double> x) { return V(x) <= lam ? 1.0 : 0.0; }, mc.samples,
      mc.seed);
  const double acceptance = static_cast<double>(res.hits) / static_cast<double>(res.total);
  if (acceptance < 1e-4)
    throw DegenerateAcceptance("sigma: acceptance rate " + std::to_string(acceptance) +
                               " below 1e-4; bounding region too loose for " + V.label);
  return {res.value, std::sqrt(res.variance)};
}

StieltjesMeasure sigma_measure(const Potential& V, std::span<const double> lam_grid,
                               const MonteCarloConfig& mc) {
  if (lam_grid.size() < 2) throw InvalidParameters("sigma_measure needs at least two grid points");
  std::vector<double> x(lam_grid.begin(), lam_grid.end());
  std::vector<double> c(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    MonteCarloConfig cell = mc;
    cell.seed = derive_seed(mc.seed, i);
    c[i] = sigma(V, x[i], cell).value;
    if (i > 0 && c[i] < c[i - 1]) c[i] = c[i - 1];  // isotonic clip of MC noise
  }
  return StieltjesMeasure::from_cdf(std::move(x), std::move(c), "sigma[" + V.label + "]");
}

namespace {

double quad_over_box(const Potential& V, double R,
                     const std::function<double(double)>& g, double rel_tol) {
  // g is applied to V(x); integrand assumed negligible outside [-R, R]^n
  if (V.dim == 1) {
    return integrate_gk(
        [&](double x) {
          const double xv[1] = {x};
          return g(V.evaluator(std::span<const double>(xv, 1)));
        },
        -R, R, rel_tol);
  }
  return integrate_gk(
      [&](double x0) {
        return integrate_gk(
            [&](double x1) {
              const double xv[2] = {x0, x1};
              return g(V.evaluator(std::span<const double>(xv, 2)));
            },
            -R, R, rel_tol * 0.1, 1e-300, 4000);
      },
      -R, R, rel_tol, 1e-300, 4000);
}

double mc_over_strata(const Potential& V, double lam_cut,
                      const std::function<double(double)>& g, const MonteCarloConfig& mc) {
  const auto strata = V.strata_for(lam_cut);
  const auto res = stratified_integral(
      V, strata, [&](std::span<const double> x) { return g(V(x)); }, mc.samples, mc.seed);
  return res.value;
}

}  // namespace

double exp_integral(const Potential& V, double t, const MonteCarloConfig& mc) {
  if (!(t > 0.0)) throw InvalidParameters("exp_integral requires t > 0");
  // e^{-t V} < e^{-35} outside the truncation radius
  const double lam_cut = 35.0 / t;
  auto g = [t](double v) { return std::exp(-t * v); };
  if (V.dim <= 2 && !V.strata_factory) {
    const double R = V.bounding_radius(lam_cut);
    return quad_over_box(V, R, g, 1e-8);
  }
  return mc_over_strata(V, lam_cut, g, mc);
}

double weyl_integral(const Potential& V, double lam, const MonteCarloConfig& mc) {
  const double p = 0.5 * V.dim;
  auto g = [lam, p](double v) { return std::pow(positive_part(lam - v), p); };
  if (V.dim <= 2 && !V.strata_factory) {
    const double R = V.bounding_radius(std::max(lam, 1e-12));
    if (!(lam > 0.0)) return 0.0;
    return quad_over_box(V, R, g, 1e-8);
  }
  return mc_over_strata(V, std::max(lam, 1.0), g, mc);
}

double phase_space_volume(const Potential& V, double a, double b, const MonteCarloConfig& mc) {
  if (!(a >= 0.0) || a > b) throw InvalidParameters("phase_space_volume requires 0 <= a <= b");
  if (a == b) return 0.0;
  const double p = 0.5 * V.dim;
  const double omega = unit_ball_volume(V.dim);
  auto g = [a, b, p](double v) {
    return std::pow(positive_part(b - v), p) - std::pow(positive_part(a - v), p);
  };
  if (V.dim <= 2 && !V.strata_factory) {
    const double R = V.bounding_radius(b);
    return omega * quad_over_box(V, R, g, 1e-8);
  }
  return omega * mc_over_strata(V, b, g, mc);
}

namespace {

// Draw x uniform on Omega_lam through the strata; rejection keeps the
// conditional law uniform. Throws DegenerateAcceptance when hits are too rare.
class OmegaSampler {
 public:
  OmegaSampler(const Potential& V, double lam, std::uint64_t seed)
      : V_(V), lam_(lam), strata_(V.strata_for(lam)), rng_(seed) {
    cum_.reserve(strata_.size());
    double acc = 0.0;
    for (const auto& s : strata_) {
      acc += s.volume;
      cum_.push_back(acc);
    }
    if (!(acc > 0.0)) throw InvalidParameters("OmegaSampler: empty strata");
  }

  void draw(std::span<double> x) {
    for (;;) {
      ++tries_;
      const double u = rng_.uniform(0.0, cum_.back());
      std::size_t si = 0;
      while (cum_[si] < u && si + 1 < strata_.size()) ++si;
      strata_[si].sample(rng_, x);
      bool owned = true;
      for (std::size_t sj = 0; sj < si; ++sj)
        if (strata_[sj].contains(x)) {
          owned = false;
          break;
        }
      if (!owned || !(V_(x) <= lam_)) {
        if (tries_ > 100000 && static_cast<double>(hits_) / static_cast<double>(tries_) < 1e-4)
          throw DegenerateAcceptance("Omega_lambda sampler acceptance below 1e-4 for " + V_.label);
        continue;
      }
      ++hits_;
      return;
    }
  }

  Rng& rng() { return rng_; }

 private:
  const Potential& V_;
  double lam_;
  std::vector<Stratum> strata_;
  std::vector<double> cum_;
  Rng rng_;
  std::size_t tries_ = 0;
  std::size_t hits_ = 0;
};

}  // namespace

OscillationSample oscillation_functional(const Potential& V, double lam, double r, double beta,
                                         const MonteCarloConfig& mc) {
  if (!(r > 0.0)) throw InvalidParameters("oscillation_functional requires r > 0");
  if (!(beta >= 0.0) || beta > 0.5)
    throw InvalidParameters("oscillation_functional requires beta in [0, 1/2]");
  const int n = V.dim;
  OmegaSampler sampler(V, lam, mc.seed);
  std::vector<double> x(n), y(n), dir(n);
  KahanSum sum, sumsq;
  for (std::size_t i = 0; i < mc.samples; ++i) {
    sampler.draw(x);
    sampler.rng().unit_sphere(dir);
    for (int d = 0; d < n; ++d) y[d] = x[d] + r * dir[d];
    const double dv = std::fabs(V(x) - V(y));
    sum.add(dv);
    sumsq.add(dv * dv);
  }
  const double N = static_cast<double>(mc.samples);
  const double mean = sum.value() / N;
  const double var = std::max(0.0, sumsq.value() / N - mean * mean);
  const double sphere = n * unit_ball_volume(n) * std::pow(r, n - 1);
  // q = |S_r| mean / (r^{n+2beta-1} lam^{1+beta}); sigma cancels exactly
  const double normalizer = std::pow(r, n + 2.0 * beta - 1.0) * std::pow(lam, 1.0 + beta);
  OscillationSample out;
  out.lam = lam;
  out.r = r;
  out.beta = beta;
  out.q_value = sphere * mean / normalizer;
  out.std_error = sphere * std::sqrt(var / N) / normalizer;
  out.n_samples = mc.samples;
  return out;
}

double doubling_check(const Potential& V, double lam0, double lam_max, const MonteCarloConfig& mc) {
  if (!(lam0 > 0.0) || !(lam0 < lam_max))
    throw InvalidParameters("doubling_check requires 0 < lam0 < lam_max");
  const auto grid = geometric_grid(0.98 * lam0, 2.02 * lam_max, V.analytic_sigma ? 64 : 16);
  const auto measure = sigma_measure(V, grid, mc);
  return doubling_estimate(measure, lam0, 2.0 * lam_max, V.analytic_sigma ? 64 : 16);
}

std::vector<HolderSample> holder_envelope(const Potential& V, double beta,
                                          std::span<const double> lam_grid,
                                          const MonteCarloConfig& mc) {
  if (!(beta >= 0.0) || beta > 0.5)
    throw InvalidParameters("holder_envelope requires beta in [0, 1/2]");
  const int n = V.dim;
  std::vector<HolderSample> table;
  table.reserve(lam_grid.size());
  for (std::size_t li = 0; li < lam_grid.size(); ++li) {
    const double lam = lam_grid[li];
    OmegaSampler sampler(V, lam, derive_seed(mc.seed, li));
    std::vector<double> x(n), y(n), dir(n);
    double worst = 0.0;
    std::size_t kept = 0;
    std::size_t guard = 0;
    while (kept < mc.samples && guard < 40 * mc.samples) {
      ++guard;
      sampler.draw(x);
      const double vx = V(x);
      if (vx < 0.5 * lam) continue;  // level band V in [lam/2, lam]
      ++kept;
      const double d = std::pow(10.0, sampler.rng().uniform(-3.0, 0.0));
      sampler.rng().unit_sphere(dir);
      for (int k = 0; k < n; ++k) y[k] = x[k] + d * dir[k];
      const double quotient = std::fabs(vx - V(y)) /
                              (std::pow(d, 2.0 * beta) * std::pow(std::max(vx, 1.0), 1.0 + beta));
      worst = std::max(worst, quotient);
    }
    table.push_back({lam, worst});
  }
  return table;
}

}  // namespace weyllab
