#pragma once

// Closed-form constants of the corner-growth limit theorems, the limit shape,
// the constrained equilibrium density, the upper-tail rate function, and the
// glue that rescales exact or simulated laws onto the Tracy-Widom scale.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "lpp/ensemble.hpp"
#include "lpp/growth.hpp"
#include "lpp/model.hpp"
#include "lpp/quadrature.hpp"
#include "lpp/tracy_widom.hpp"

namespace lpp {

inline void check_gamma_q(double gamma, double q) {
  check_q(q);
  require(gamma >= 1.0 && std::isfinite(gamma), "gamma must be >= 1");
}

/// (1 + sqrt(q gamma))^2/(1-q) - 1
inline double omega(double gamma, double q) {
  check_gamma_q(gamma, q);
  const double r = 1.0 + std::sqrt(q * gamma);
  return r * r / (1.0 - q) - 1.0;
}

inline double sigma(double gamma, double q) {
  check_gamma_q(gamma, q);
  return std::pow(q, 1.0 / 6.0) * std::pow(gamma, -1.0 / 6.0) *
         std::pow(std::sqrt(gamma) + std::sqrt(q), 2.0 / 3.0) *
         std::pow(1.0 + std::sqrt(q * gamma), 2.0 / 3.0) / (1.0 - q);
}

struct EdgeConstants {
  double gamma = 1.0;
  double q = 0.5;
  double omega = 0.0;
  double sigma = 0.0;
  double a = 0.0;  // lower end of the band where the density is below 1
  double b = 0.0;  // upper support endpoint, b = omega + 1
  double c = 0.0;  // b - a
  double B = 1.0;
  double D = 1.0;

  bool saturated_regime() const { return gamma < 1.0 / q; }
};

inline EdgeConstants edge_constants(double gamma, double q) {
  check_gamma_q(gamma, q);
  const double r = std::sqrt(q * gamma);
  EdgeConstants k;
  k.gamma = gamma;
  k.q = q;
  k.omega = omega(gamma, q);
  k.sigma = sigma(gamma, q);
  k.b = (1.0 + r) * (1.0 + r) / (1.0 - q);
  k.a = (1.0 - r) * (1.0 - r) / (1.0 - q);
  k.c = 4.0 * r / (1.0 - q);
  k.B = (gamma + q) / (2.0 * r);
  k.D = (1.0 + q * gamma) / (2.0 * r);
  return k;
}

/// Membership in the limit shape: y + 2 sqrt(q x y) + x <= 1 - q.
inline bool shape_contains(double x, double y, double q) {
  check_q(q);
  require(x >= 0.0 && y >= 0.0, "shape_contains needs x, y >= 0");
  return y + 2.0 * std::sqrt(q * x * y) + x <= 1.0 - q + 1e-15;
}

struct ExpConstants {
  double mean;   // lim H([gamma N], N)/N
  double scale;  // fluctuation scale in units of N^{1/3}
};

inline ExpConstants exp_constants(double gamma) {
  require(gamma >= 1.0 && std::isfinite(gamma), "gamma must be >= 1");
  const double r = 1.0 + std::sqrt(gamma);
  return {r * r, std::pow(gamma, -1.0 / 6.0) * std::pow(r, 4.0 / 3.0)};
}

// ---------------------------------------------------------------------------
// Equilibrium density

/// Density of the constrained equilibrium measure on [0, b]; at most 1.
class EquilibriumDensity {
 public:
  enum class Regime { GammaGE, GammaLT };

  explicit EquilibriumDensity(const EdgeConstants& k)
      : k_(k), regime_(k.saturated_regime() ? Regime::GammaLT : Regime::GammaGE) {}

  const EdgeConstants& constants() const { return k_; }
  Regime regime() const { return regime_; }

  /// v(x) on [-1, 1]. arctan(y/x) is taken as atan2(y, x) since the
  /// denominator sqrt(1-x^2) sqrt(E^2-1) is never negative; at x = +-1 this
  /// gives the correct one-sided limits.
  double v(double x) const {
    require(x >= -1.0 && x <= 1.0, "v(x) needs x in [-1,1]");
    const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
    const double td = std::atan2(k_.D * x + 1.0, s * std::sqrt(std::max(0.0, k_.D * k_.D - 1.0)));
    const double tb = std::atan2(k_.B * x + 1.0, s * std::sqrt(std::max(0.0, k_.B * k_.B - 1.0)));
    const double r = regime_ == Regime::GammaGE ? td - tb : std::numbers::pi - td - tb;
    return std::clamp(r / (2.0 * std::numbers::pi), 0.0, 1.0);
  }

  double operator()(double t) const {
    require(t >= 0.0 && t <= k_.b * (1.0 + 1e-14), "density evaluated outside [0, b]");
    if (t <= k_.a) return regime_ == Regime::GammaLT ? 1.0 : 0.0;
    if (t >= k_.b) return 0.0;
    return v(std::min(1.0, 2.0 * (t - k_.a) / k_.c - 1.0));
  }

  /// Total mass; the band part is integrated in x = cos(theta), which removes
  /// the square-root endpoint behaviour of v.
  double mass() const {
    const double band = 0.5 * k_.c * integrate([this](double th) { return v(std::cos(th)) * std::sin(th); },
                                               0.0, std::numbers::pi, 64, 20);
    return band + (regime_ == Regime::GammaLT ? k_.a : 0.0);
  }

 private:
  EdgeConstants k_;
  Regime regime_;
};

inline EquilibriumDensity equilibrium_density(double gamma, double q) {
  return EquilibriumDensity(edge_constants(gamma, q));
}

// ---------------------------------------------------------------------------
// Rate functions

/// Upper-tail rate J(t); zero for t <= b. With y = cosh(theta):
/// J = c/(8 sqrt(q gamma)) int_0^{acosh x} (x - cosh th)[(gamma-q)/(cosh th + B) + (1-q gamma)/(cosh th + D)] dth.
inline double rate_J(const EdgeConstants& k, double t) {
  require(t >= 0.0 && std::isfinite(t), "rate_J needs t >= 0");
  if (t <= k.b) return 0.0;
  const double x = 2.0 * (t - k.a) / k.c - 1.0;
  const double top = std::acosh(x);
  const double g = k.gamma, q = k.q;
  const double val = integrate(
      [&](double th) {
        const double y = std::cosh(th);
        return (x - y) * ((g - q) / (y + k.B) + (1.0 - q * g) / (y + k.D));
      },
      0.0, top, 8, 20);
  return k.c / (8.0 * std::sqrt(q * g)) * val;
}

inline double rate_J(double gamma, double q, double t) { return rate_J(edge_constants(gamma, q), t); }

/// Leading coefficient of J(b + delta) ~ C delta^{3/2}.
inline double rate_J_edge_coefficient(double gamma, double q) {
  check_gamma_q(gamma, q);
  return 2.0 * std::pow(1.0 - q, 1.5) * std::pow(gamma, 0.25) /
         (3.0 * std::pow(q, 0.25) * (std::sqrt(q) + std::sqrt(gamma)) * (1.0 + std::sqrt(q * gamma)));
}

/// Lower-tail rate function. No closed form is available.
[[noreturn]] inline double rate_L(double /*gamma*/, double /*q*/, double /*t*/) {
  throw not_implemented("lower-tail rate function L(t) has no explicit form");
}

/// exp(-2 N J(t + 1)): bound on P[G([gamma N], N) > N t] valid for every N.
inline double tail_bound_finiteN(double gamma, double q, int N, double t) {
  require(N >= 1, "N must be positive");
  require(t >= 0.0, "t must be nonnegative");
  return std::exp(-2.0 * N * rate_J(gamma, q, t + 1.0));
}

// ---------------------------------------------------------------------------
// Rescaling onto the Tracy-Widom variable

/// s -> p_N(floor(N omega + sigma N^{1/3} s)) from a tabulated exact CDF.
class RescaledCdf {
 public:
  RescaledCdf(std::vector<CdfValue> table, const EdgeConstants& k, int N) : table_(std::move(table)), k_(k), N_(N) {
    require(!table_.empty(), "empty CDF table");
    t_lo_ = static_cast<std::int64_t>(table_.front().t);
    for (std::size_t i = 0; i < table_.size(); ++i)
      require(static_cast<std::int64_t>(table_[i].t) == t_lo_ + static_cast<std::int64_t>(i),
              "CDF table must cover consecutive integers");
  }

  std::int64_t threshold(double s) const {
    return static_cast<std::int64_t>(std::floor(N_ * k_.omega + k_.sigma * std::cbrt(double(N_)) * s));
  }

  double operator()(double s) const {
    const std::int64_t t = threshold(s);
    const std::int64_t i = t - t_lo_;
    if (i < 0 || i >= static_cast<std::int64_t>(table_.size()))
      throw domain_error("rescaled CDF evaluated outside its tabulated range");
    return table_[static_cast<std::size_t>(i)].p;
  }

  double max_err() const {
    double e = 0.0;
    for (const auto& v : table_) e = std::max(e, v.err);
    return e;
  }

 private:
  std::vector<CdfValue> table_;
  EdgeConstants k_;
  int N_;
  std::int64_t t_lo_ = 0;
};

/// Tabulates the exact Meixner CDF over the thresholds needed for s in [s_lo, s_hi].
inline RescaledCdf rescale_cdf(const ModelParams& params, const EdgeConstants& k, double s_lo, double s_hi) {
  const int N = params.N;
  const double scale = k.sigma * std::cbrt(double(N));
  const auto t_lo = static_cast<std::int64_t>(std::floor(N * k.omega + scale * s_lo));
  const auto t_hi = static_cast<std::int64_t>(std::floor(N * k.omega + scale * s_hi));
  return RescaledCdf(MeixnerEnsemble(params).table(t_lo, t_hi), k, N);
}

inline RescaledCdf rescale_cdf(std::vector<CdfValue> exact, const EdgeConstants& k, int N) {
  return RescaledCdf(std::move(exact), k, N);
}

/// max over the grid of |lhs(s) - rhs_i|.
inline double sup_distance(const std::function<double(double)>& lhs, std::span<const double> grid,
                           std::span<const double> rhs) {
  require(grid.size() == rhs.size() && !grid.empty(), "grid and reference sizes differ");
  double d = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) d = std::max(d, std::abs(lhs(grid[i]) - rhs[i]));
  return d;
}

struct ConvergenceRow {
  int N;
  double sup_dist;
  double grid_lo;
  double grid_hi;
};

/// d_N = max over an s-grid on [s_lo, s_hi] of |p_N(rescaled) - F_2(s)| for each N.
inline std::vector<ConvergenceRow> convergence_ladder(double gamma, double q, std::span<const int> ladder,
                                                      double s_lo = -5.0, double s_hi = 2.0, double step = 0.01) {
  const EdgeConstants k = edge_constants(gamma, q);
  const std::vector<double> grid = uniform_grid(s_lo, s_hi, step);
  std::vector<double> f;
  f.reserve(grid.size());
  for (double s : grid) f.push_back(tw_cdf_fredholm(s).f);
  std::vector<ConvergenceRow> rows;
  for (int N : ladder) {
    const ModelParams p = ModelParams::from_aspect(q, gamma, N);
    const RescaledCdf r = rescale_cdf(p, k, s_lo, s_hi);
    rows.push_back({N, sup_distance(r, grid, f), s_lo, s_hi});
  }
  return rows;
}

/// Centering and scale of the TASEP current Y([ut], t).
///
/// Both follow from P[Y(k,t) <= m] = 1 - P[H(m+k+1, m+1) <= t] and the
/// exponential-case constants: at m = t(1-u)^2/4 the passage time has mean t,
/// fluctuation 4^{1/3} t^{1/3} (1-u^2)^{-1/3}, and slope dH/dm = 4/(1-u^2).
/// (Y - center)/scale then converges to 1 - F(-xi).
struct TasepFluct {
  double u;
  double center(double t) const { return t * (1.0 - u) * (1.0 - u) / 4.0; }
  double scale(double t) const {
    return std::pow(2.0, -4.0 / 3.0) * std::pow(1.0 - u * u, 2.0 / 3.0) * std::cbrt(t);
  }
  double rescale(double y, double t) const { return (y - center(t)) / scale(t); }
};

inline TasepFluct tasep_fluct_params(double u) {
  require(u >= 0.0 && u < 1.0, "u must lie in [0,1)");
  return {u};
}

/// Monte Carlo batch of G([gamma N], N) rescaled with the edge constants.
inline SampleBatch monte_carlo_batch(const ModelParams& params, std::size_t n_samples, std::uint64_t seed,
                                     const EdgeConstants& scaling, unsigned threads = 1) {
  return monte_carlo_batch(params, WeightKind::Geometric, n_samples, seed, scaling.omega, scaling.sigma, threads);
}

}  // namespace lpp
