#pragma once

// GUE Tracy-Widom distribution F_2 by two independent routes: a Nystrom
// discretization of det(I - K_Airy) on [s, inf), and the Hastings-McLeod
// solution of Painleve II, log F(s) = -int_s^inf (x - s) u(x)^2 dx.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lpp/airy.hpp"
#include "lpp/model.hpp"
#include "lpp/quadrature.hpp"

namespace lpp {

enum class TwMethod { Fredholm, Painleve };

inline const char* to_string(TwMethod m) { return m == TwMethod::Fredholm ? "fredholm" : "painleve"; }

struct TwValue {
  double s = 0.0;
  double f = 0.0;
  TwMethod method = TwMethod::Fredholm;
  double est_err = 0.0;
};

/// K_Airy(x,y); the diagonal value Ai'(x)^2 - x Ai(x)^2 is used at the
/// midpoint when |x - y| < 1e-7.
inline double airy_kernel(const AiryValue& a, const AiryValue& b) {
  const double d = a.x - b.x;
  if (std::abs(d) < 1e-7) {
    const AiryValue m = airy(0.5 * (a.x + b.x));
    return m.ai_prime * m.ai_prime - m.x * m.ai * m.ai;
  }
  return (a.ai * b.ai_prime - a.ai_prime * b.ai) / d;
}

inline double airy_kernel(double x, double y) { return airy_kernel(airy(x), airy(y)); }

/// int_x^inf (y - x) Ai(y)^2 dy in closed form; also the trace of K_Airy on [x, inf).
inline double airy_tail_trace(double x) {
  const AiryValue a = airy(x);
  return 2.0 / 3.0 * x * x * a.ai * a.ai - 2.0 / 3.0 * x * a.ai_prime * a.ai_prime - a.ai * a.ai_prime / 3.0;
}

struct TwFredholmOptions {
  double tail_tol = 1e-12;
  double tol = 1e-12;  // node doubling stops once |dF| falls below this
  int min_nodes = 24;
  int max_nodes = 256;
};

namespace detail {

inline double airy_cutoff(double tail_tol) {
  double u = 2.0;
  while (airy_tail_trace(u) > tail_tol) u += 0.05;
  return u;
}

inline double airy_nystrom(double a, double b, int n) {
  const QuadratureRule r = composite_gauss_legendre(a, b, 1, n);
  std::vector<AiryValue> av(r.size());
  std::vector<double> sw(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    av[i] = airy(r.nodes[i]);
    sw[i] = std::sqrt(r.weights[i]);
  }
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const double k = (i == j ? av[i].ai_prime * av[i].ai_prime - av[i].x * av[i].ai * av[i].ai
                               : airy_kernel(av[i], av[j]));
      const double v = (i == j ? 1.0 : 0.0) - sw[i] * k * sw[j];
      m(i, j) = v;
      m(j, i) = v;
    }
  return Eigen::PartialPivLU<Eigen::MatrixXd>(m).determinant();
}

}  // namespace detail

/// F_2(s) as det(I - K_Airy) on [s, U], U = max(U*, s + 1), where U* makes
/// the trace of the discarded piece smaller than tail_tol.
inline TwValue tw_cdf_fredholm(double s, TwFredholmOptions opts = {}) {
  if (!std::isfinite(s)) throw domain_error("Tracy-Widom argument must be finite");
  if (s < -12.0) throw domain_error("Fredholm route supports s >= -12");
  static const double u_star = detail::airy_cutoff(1e-12);
  const double upper = std::max(opts.tail_tol == 1e-12 ? u_star : detail::airy_cutoff(opts.tail_tol), s + 1.0);
  const double tail = s + 1.0 > 29.0 ? 0.0 : std::max(airy_tail_trace(std::min(upper, 29.0)), 0.0);
  if (s >= 16.0) {
    // trace below 1e-40; det(I - K) = 1 - trace + O(trace^2)
    return {s, 1.0, TwMethod::Fredholm, std::max(airy_tail_trace(std::min(s, 29.0)), 0.0)};
  }
  double prev = detail::airy_nystrom(s, upper, opts.min_nodes);
  for (int n = 2 * opts.min_nodes;; n = std::min(2 * n, opts.max_nodes)) {
    const double cur = detail::airy_nystrom(s, upper, n);
    const double delta = std::abs(cur - prev);
    if (delta < opts.tol || n == opts.max_nodes) {
      const double err = delta + tail;
      if (delta >= 1e-6) throw numerical_error("Airy Nystrom did not converge at s = " + std::to_string(s));
      return {s, std::clamp(cur, 0.0, 1.0), TwMethod::Fredholm, err};
    }
    prev = cur;
  }
}

// ---------------------------------------------------------------------------
// Painleve II

/// Dense Taylor solution of u'' = x u + 2u^3 with w' = -u^2, v' = -w,
/// integrated leftward from x0 where u = Ai to first order. log F_2 = -v.
class Painleve2Solution {
 public:
  struct Step {
    double xc;
    double h;  // signed (negative)
    std::vector<double> u, w, v;
  };

  double x0 = 8.0;
  double x_min = -8.0;
  std::vector<Step> steps;
  double tol = 0.0;
  int u_violations = 0;  // steps where u failed to increase leftward

  bool covers(double x) const { return x >= x_min - 1e-12 && x <= x0 + 1e-12; }

  /// (u, v) at x inside [x_min, x0].
  std::pair<double, double> eval(double x) const {
    if (!covers(x)) throw domain_error("x outside the Painleve II solution range");
    if (x >= x0) return {steps.front().u[0], steps.front().v[0]};
    // steps run leftward; find the one whose span [xc + h, xc] contains x
    auto it = std::lower_bound(steps.begin(), steps.end(), x,
                               [](const Step& st, double val) { return st.xc + st.h > val; });
    if (it == steps.end()) it = std::prev(steps.end());
    const double d = x - it->xc;
    auto horner = [d](const std::vector<double>& c) {
      double r = 0.0;
      for (auto k = c.rbegin(); k != c.rend(); ++k) r = r * d + *k;
      return r;
    };
    return {horner(it->u), horner(it->v)};
  }

  double log_f(double x) const { return -eval(x).second; }

  /// Step nodes from x0 down to x_min, and u there.
  std::vector<double> grid() const {
    std::vector<double> g;
    for (const auto& st : steps) g.push_back(st.xc);
    g.push_back(x_min);
    return g;
  }
  std::vector<double> u_values() const {
    std::vector<double> out;
    for (double x : grid()) out.push_back(eval(x).first);
    return out;
  }
};

/// Integrates from x0 down to s_min. tol is the relative truncation target of
/// each Taylor step; order is the Taylor degree. amplitude k starts from
/// u = k Ai(x0); k = 1 is Hastings-McLeod, k > 1 develops a pole.
inline Painleve2Solution painleve2_solve(double x0, double s_min, double tol = 1e-16, int order = 28,
                                         double amplitude = 1.0) {
  require(x0 >= 6.0, "Painleve II start point must be >= 6");
  require(s_min < x0, "s_min must lie left of the start point");
  require(s_min >= -8.0, "Painleve II route supports s >= -8");
  require(tol > 0.0 && order >= 8, "invalid Painleve II tolerance or order");
  struct {
    double x0, tol, blowup;
    int order;
  } opts{x0, tol, 1e6, order};
  const double x_min = s_min;
  const int P = opts.order;
  const AiryValue a0 = airy(opts.x0);
  double u = amplitude * a0.ai, du = amplitude * a0.ai_prime;
  double w = amplitude * amplitude * (a0.ai_prime * a0.ai_prime - opts.x0 * a0.ai * a0.ai);
  double v = amplitude * amplitude * airy_tail_trace(opts.x0);

  Painleve2Solution sol;
  sol.x0 = opts.x0;
  sol.x_min = x_min;
  sol.tol = opts.tol;
  double xc = opts.x0;
  std::vector<double> a(P + 1), sq(P + 1), cu(P + 1), wc(P + 1), vc(P + 1);
  while (xc > x_min) {
    a.assign(P + 1, 0.0);
    sq.assign(P + 1, 0.0);
    cu.assign(P + 1, 0.0);
    a[0] = u;
    a[1] = du;
    wc[0] = w;
    vc[0] = v;
    for (int n = 0; n + 2 <= P; ++n) {
      double s = 0.0;
      for (int i = 0; i <= n; ++i) s += a[i] * a[n - i];
      sq[n] = s;
      double c = 0.0;
      for (int i = 0; i <= n; ++i) c += sq[i] * a[n - i];
      cu[n] = c;
      a[n + 2] = (xc * a[n] + (n > 0 ? a[n - 1] : 0.0) + 2.0 * c) / ((n + 1.0) * (n + 2.0));
    }
    for (int n = P - 1; n <= P; ++n) {
      double s = 0.0;
      for (int i = 0; i <= n; ++i) s += a[i] * a[n - i];
      sq[n] = s;
    }
    for (int n = 0; n < P; ++n) {
      wc[n + 1] = -sq[n] / (n + 1.0);
      vc[n + 1] = -wc[n] / (n + 1.0);
    }
    auto radius = [&](const std::vector<double>& c) {
      double r = std::numeric_limits<double>::infinity();
      const double scale = std::abs(c[0]) + std::abs(c[1]);
      for (int k : {P - 1, P})
        if (c[k] != 0.0) r = std::min(r, std::pow(opts.tol * scale / std::abs(c[k]), 1.0 / k));
      return r;
    };
    // relative tolerance on u; w and v are integrals of u^2 and converge no slower
    double h = 0.9 * std::min(radius(a), 0.5);
    h = std::min(h, xc - x_min);
    h = -h;

    Painleve2Solution::Step st{xc, h, a, wc, vc};
    auto horner = [h](const std::vector<double>& c, bool deriv) {
      double r = 0.0;
      if (!deriv) {
        for (auto k = c.rbegin(); k != c.rend(); ++k) r = r * h + *k;
      } else {
        for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) r = r * h + k * c[k];
      }
      return r;
    };
    const double u_prev = u;
    u = horner(a, false);
    if (u < u_prev) ++sol.u_violations;
    du = horner(a, true);
    w = horner(wc, false);
    v = horner(vc, false);
    sol.steps.push_back(std::move(st));
    if (!std::isfinite(u) || std::abs(u) > opts.blowup)
      throw numerical_error("Painleve II solution blew up near x = " + std::to_string(xc + h));
    xc = xc + h;
    if (std::abs(xc - x_min) < 1e-13) xc = x_min;
  }
  return sol;
}

namespace detail {

struct PainleveCache {
  double x_min;
  Painleve2Solution fine, coarse;
};

inline const PainleveCache& painleve_cache(double x_min) {
  static thread_local std::vector<PainleveCache> cache;
  for (const auto& c : cache)
    if (c.x_min <= x_min) return c;
  const double lo = std::min(x_min, -8.0);
  cache.push_back({lo, painleve2_solve(8.0, lo, 1e-16), painleve2_solve(8.0, lo, 1e-14)});
  return cache.back();
}

}  // namespace detail

/// F_2(s) from the Painleve II transcendent; est_err compares two solves at
/// tolerances a factor 100 apart.
inline TwValue tw_cdf_painleve(double s) {
  if (!std::isfinite(s)) throw domain_error("Tracy-Widom argument must be finite");
  if (s < -8.0) throw domain_error("Painleve route supports s >= -8");
  if (s >= 8.0) {
    const double t = s > 29.0 ? 0.0 : airy_tail_trace(s);
    return {s, std::exp(-t), TwMethod::Painleve, 1e-14};
  }
  const auto& c = detail::painleve_cache(s);
  const auto [u, v] = c.fine.eval(s);
  const double f = std::exp(-v);
  const double f2 = std::exp(-c.coarse.eval(s).second);
  return {s, f, TwMethod::Painleve, std::abs(f - f2) + 1e-14 * std::max(1.0, std::abs(u))};
}

inline TwValue tw_cdf(double s, TwMethod method = TwMethod::Fredholm) {
  return method == TwMethod::Fredholm ? tw_cdf_fredholm(s) : tw_cdf_painleve(s);
}

inline std::vector<TwValue> tw_table(std::span<const double> grid, TwMethod method = TwMethod::Fredholm) {
  std::vector<TwValue> out;
  out.reserve(grid.size());
  for (double s : grid) out.push_back(tw_cdf(s, method));
  return out;
}

/// Number of adjacent pairs in a table (sorted by s) where F decreases.
inline int monotonicity_violations(std::span<const TwValue> table) {
  int bad = 0;
  for (std::size_t i = 1; i < table.size(); ++i)
    if (table[i].s > table[i - 1].s && table[i].f < table[i - 1].f) ++bad;
  return bad;
}

/// Evenly spaced grid lo, lo + step, ..., up to hi inclusive.
inline std::vector<double> uniform_grid(double lo, double hi, double step) {
  require(step > 0.0 && hi >= lo, "invalid grid");
  std::vector<double> g;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= n; ++k) g.push_back(lo + k * step);
  return g;
}

}  // namespace lpp
