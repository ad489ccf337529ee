#pragma once

// Independent recurrence oracles: the Stieltjes procedure run on explicit
// discrete measures, shared by the unit tests and the build-time gate.

#include <cmath>
#include <vector>

#include "lpp/quadrature.hpp"

namespace lpp::oracle {

struct Moments {
  std::vector<double> A, B;
  double h0;
};

// Stieltjes procedure on a discrete measure (x_k, w_k): builds the monic
// orthogonal polynomials by explicit inner products.
inline Moments stieltjes(const std::vector<double>& x, const std::vector<double>& w, int n) {
  const std::size_t m = x.size();
  std::vector<double> prev(m, 0.0), cur(m, 1.0), next(m);
  Moments out;
  double h_prev = 0.0;
  for (int k = 0; k <= n; ++k) {
    double h = 0.0, xh = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      h += cur[i] * cur[i] * w[i];
      xh += x[i] * cur[i] * cur[i] * w[i];
    }
    if (k == 0) out.h0 = h;
    out.A.push_back(xh / h);
    out.B.push_back(k == 0 ? 0.0 : h / h_prev);
    for (std::size_t i = 0; i < m; ++i) next[i] = (x[i] - out.A[k]) * cur[i] - out.B[k] * prev[i];
    prev.swap(cur);
    cur.swap(next);
    h_prev = h;
  }
  return out;
}

// Meixner weight by the product recursion w(x+1) = w(x) q (x+K)/(x+1).
inline void meixner_measure(int K, double q, int X, std::vector<double>& x, std::vector<double>& w) {
  x.clear();
  w.clear();
  double v = 1.0;
  for (int k = 0; k <= X; ++k) {
    x.push_back(k);
    w.push_back(v);
    v *= q * (k + K) / (k + 1.0);
  }
}

// x^alpha e^{-x} dx with x = s^2, so the integrand is smooth in s.
inline void laguerre_measure(double alpha, std::vector<double>& x, std::vector<double>& w) {
  const auto rule = composite_gauss_legendre(0.0, 11.0, 110, 20);
  x.clear();
  w.clear();
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double s = rule.nodes[i];
    x.push_back(s * s);
    w.push_back(rule.weights[i] * 2.0 * std::pow(s, 2 * alpha + 1) * std::exp(-s * s));
  }
}

}  // namespace lpp::oracle
