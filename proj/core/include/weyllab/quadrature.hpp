#pragma once

#include <cmath>
#include <vector>

#include "weyllab/errors.hpp"

namespace weyllab {

// Adaptive Gauss-Kronrod 7/15 on [a, b]. The integrands here are smooth except
// for isolated (lam - V)_+^{p} kinks, which interval bisection resolves.
template <class Func>
double integrate_gk(const Func& f, double a, double b, double rel_tol = 1e-10,
                    double abs_tol = 1e-300, int max_intervals = 20000) {
  static const double nodes[8] = {
      0.000000000000000, 0.405845151377397, 0.741531185599394, 0.949107912342759,
      0.207784955007898, 0.586087235467691, 0.864864423359769, 0.991455371120813};
  static const double wg[4] = {0.417959183673469, 0.381830050505119,
                               0.279705391489277, 0.129484966168870};
  static const double wk[8] = {0.209482141084728, 0.190350578064785, 0.140653259715525,
                               0.063092092629979, 0.204432940075298, 0.169004726639267,
                               0.104790010322250, 0.022935322010529};

  auto panel = [&](double lo, double hi, double& err) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double f0 = f(mid);
    double g = wg[0] * f0;
    double k = wk[0] * f0;
    for (int i = 1; i < 8; ++i) {
      const double dx = half * nodes[i];
      const double fi = f(mid + dx) + f(mid - dx);
      k += wk[i] * fi;
      if (i < 4) g += wg[i] * fi;
    }
    g *= half;
    k *= half;
    err = std::pow(200.0 * std::fabs(g - k), 1.5);
    return k;
  };

  struct Seg { double lo, hi, val, err; };
  std::vector<Seg> segs;
  double err0;
  const double v0 = panel(a, b, err0);
  segs.push_back({a, b, v0, err0});
  double total = v0, total_err = err0;

  while (total_err > abs_tol && total_err > rel_tol * std::fabs(total)) {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < segs.size(); ++i)
      if (segs[i].err > segs[worst].err) worst = i;
    if (static_cast<int>(segs.size()) >= max_intervals)
      throw QuadratureFailure("adaptive GK7/15 did not meet tolerance within interval cap");
    const Seg s = segs[worst];
    const double mid = 0.5 * (s.lo + s.hi);
    if (mid <= s.lo || mid >= s.hi) break;  // interval at machine resolution
    double e1, e2;
    const double v1 = panel(s.lo, mid, e1);
    const double v2 = panel(mid, s.hi, e2);
    segs[worst] = {s.lo, mid, v1, e1};
    segs.push_back({mid, s.hi, v2, e2});
    total = 0.0;
    total_err = 0.0;
    for (const auto& sg : segs) {
      total += sg.val;
      total_err += sg.err;
    }
  }
  return total;
}

}  // namespace weyllab
