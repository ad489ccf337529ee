#pragma once

// Kolmogorov-Smirnov distances and the finite-sample bands used to accept
// simulation-vs-law comparisons.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lpp/model.hpp"

namespace lpp {

/// Dvoretzky-Kiefer-Wolfowitz band: P[sup|F_n - F| > eps] <= alpha.
inline double dkw_bound(std::size_t n, double alpha = 0.01) {
  require(n > 0 && alpha > 0.0 && alpha < 1.0, "DKW bound needs n > 0 and alpha in (0,1)");
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

/// Asymptotic two-sample KS critical value c(alpha) sqrt((n+m)/(nm)).
inline double two_sample_bound(std::size_t n, std::size_t m, double alpha = 0.01) {
  require(n > 0 && m > 0, "two-sample bound needs non-empty samples");
  const double c = std::sqrt(std::log(2.0 / alpha) / 2.0);
  return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

/// sup_x |F_n(x) - F(x)| against a continuous reference F. Ties are handled
/// because both one-sided limits are taken at every order statistic.
inline double ks_continuous(std::span<const double> samples, const std::function<double(double)>& cdf) {
  require(!samples.empty(), "KS distance of an empty sample");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

/// sup over integers k of |F_n(k) - F(k)| for integer-valued samples, where
/// cdf(k) = P[X <= k]. Both functions are right-continuous steps on the
/// integers, so checking k in [min - 1, max] is exhaustive.
inline double ks_integer(std::span<const double> samples, const std::function<double(std::int64_t)>& cdf) {
  require(!samples.empty(), "KS distance of an empty sample");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const auto lo = static_cast<std::int64_t>(x.front()) - 1;
  const auto hi = static_cast<std::int64_t>(x.back());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  std::size_t idx = 0;
  for (std::int64_t k = lo; k <= hi; ++k) {
    while (idx < x.size() && x[idx] <= static_cast<double>(k)) ++idx;
    d = std::max(d, std::abs(idx / n - cdf(k)));
  }
  return d;
}

inline double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), "KS distance of an empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / x.size() - static_cast<double>(j) / y.size()));
  }
  return d;
}

inline double mean(std::span<const double> v) {
  require(!v.empty(), "mean of an empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Standard error of a binomial frequency.
inline double binomial_se(double p, std::size_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

}  // namespace lpp
