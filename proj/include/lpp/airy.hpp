#pragma once

// Airy function Ai and its derivative on [-30, 30].
//
// Right of x = 8 the exponentially small asymptotic series is used. Everywhere
// else the Airy ODE y'' = x y is advanced by Taylor series: outward from the
// origin for x <= 2.5, and leftward from x = 8 for 2.5 < x < 8 so the
// integration always runs in the direction in which Ai dominates.

#include <cmath>
#include <numbers>
#include <string>

#include "lpp/model.hpp"

namespace lpp {

struct AiryValue {
  double x = 0.0;
  double ai = 0.0;
  double ai_prime = 0.0;
  double est_err = 0.0;  // rough relative accuracy
};

namespace detail {

// Ai(0) = 3^{-2/3}/Gamma(2/3), Ai'(0) = -3^{-1/3}/Gamma(1/3)
inline const double kAi0 = std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0);
inline const double kAiPrime0 = -std::pow(3.0, -1.0 / 3.0) / std::tgamma(1.0 / 3.0);

/// One Taylor step of y'' = x y from xc to xc + h. Terms are stored already
/// multiplied by h^n so nothing overflows.
inline void airy_taylor_step(double xc, double h, double& y, double& dy) {
  double bm1 = 0.0;  // b_{n-1}
  double b0 = y;     // b_n
  double b1 = dy * h;
  double val = b0 + b1;
  double der = b1;
  const double h2 = h * h, h3 = h2 * h;
  double tiny_run = 0;
  for (int n = 0; n < 120; ++n) {
    const double b2 = (xc * b0 * h2 + bm1 * h3) / ((n + 1.0) * (n + 2.0));
    val += b2;
    der += (n + 2.0) * b2;
    bm1 = b0;
    b0 = b1;
    b1 = b2;
    if (std::abs(b2) <= 1e-18 * (std::abs(val) + std::abs(der))) {
      if (++tiny_run >= 3) break;
    } else {
      tiny_run = 0;
    }
  }
  y = val;
  dy = der / h;
}

inline void airy_march(double from, double to, double& y, double& dy) {
  const double span = to - from;
  const double max_step = std::max(std::abs(from), std::abs(to)) > 8.0 ? 0.25 : 0.5;
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(span) / max_step)));
  const double h = span / steps;
  for (int k = 0; k < steps; ++k) airy_taylor_step(from + k * h, h, y, dy);
}

/// Asymptotic expansion for large positive x, summed to the smallest term.
inline AiryValue airy_asymptotic(double x) {
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  const double pref = std::exp(-zeta) / (2.0 * std::sqrt(std::numbers::pi));
  double u = 1.0, su = 1.0, sv = 1.0, last = 1.0;
  double zk = 1.0;
  double sign = 1.0;
  for (int k = 1; k < 60; ++k) {
    u *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k);
    const double v = -(6.0 * k + 1.0) / (6.0 * k - 1.0) * u;
    zk *= zeta;
    sign = -sign;
    const double term = u / zk;
    if (term > last) break;
    su += sign * term;
    sv += sign * v / zk;
    last = term;
    if (term < 1e-17) break;
  }
  const double x14 = std::pow(x, 0.25);
  return {x, pref / x14 * su, -pref * x14 * sv, std::max(last, 1e-16)};
}

}  // namespace detail

inline AiryValue airy(double x) {
  if (!std::isfinite(x) || std::abs(x) > 30.0)
    throw domain_error("airy: argument " + std::to_string(x) + " outside [-30, 30]");
  if (x >= 8.0) return detail::airy_asymptotic(x);
  double y, dy, from;
  if (x > 2.5) {
    const AiryValue start = detail::airy_asymptotic(8.0);
    y = start.ai;
    dy = start.ai_prime;
    from = 8.0;
  } else {
    y = detail::kAi0;
    dy = detail::kAiPrime0;
    from = 0.0;
  }
  if (x != from) detail::airy_march(from, x, y, dy);
  return {x, y, dy, x > 2.5 ? 1e-13 : 1e-15 * (1.0 + std::abs(x))};
}

}  // namespace lpp
