#pragma once

// Monic three-term recurrences for the Meixner and Laguerre weights and the
// orthonormal wavefunctions phi_j(x) = p_j(x) sqrt(w(x) / h_j).

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lpp/model.hpp"

namespace lpp {

/// log of w_K^q(x) = C(x+K-1, x) q^x.
inline double meixner_weight_log(double x, int K, double q) {
  require(x >= 0.0, "Meixner weight needs x >= 0");
  require(K >= 1, "Meixner weight needs K >= 1");
  return std::lgamma(x + K) - std::lgamma(static_cast<double>(K)) - std::lgamma(x + 1.0) + x * std::log(q);
}

/// log of x^alpha e^{-x} on (0, inf).
inline double laguerre_weight_log(double x, double alpha) {
  if (x <= 0.0) return alpha == 0.0 && x == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return alpha * std::log(x) - x;
}

enum class Family { Meixner, Laguerre };

/// p_{n+1}(x) = (x - A_n) p_n(x) - B_n p_{n-1}(x), p_0 = 1.
/// log_norms[n] = log of the squared monic norm h_n = h_0 B_1 ... B_n.
struct MonicRecurrence {
  Family family = Family::Meixner;
  int K = 1;           // Meixner
  double q = 0.5;      // Meixner
  double alpha = 0.0;  // Laguerre
  std::vector<double> A;
  std::vector<double> B;  // B[0] unused (zero)
  std::vector<double> log_norms;

  int n_max() const { return static_cast<int>(A.size()) - 1; }

  double log_weight(double x) const {
    return family == Family::Meixner ? meixner_weight_log(x, K, q) : laguerre_weight_log(x, alpha);
  }
};

inline void finish_norms(MonicRecurrence& r, double log_h0) {
  r.log_norms.assign(r.A.size(), log_h0);
  for (std::size_t n = 1; n < r.A.size(); ++n) {
    if (!(r.B[n] > 0.0) || !std::isfinite(r.B[n]))
      throw numerical_error("recurrence coefficient B_" + std::to_string(n) + " left the floating range");
    r.log_norms[n] = r.log_norms[n - 1] + std::log(r.B[n]);
  }
}

/// A_n = (n + (n+K) q)/(1-q), B_n = n (n+K-1) q/(1-q)^2.
inline MonicRecurrence meixner_recurrence(int K, double q, int n_max) {
  require(K >= 1, "K must be >= 1");
  check_q(q);
  require(n_max >= 1, "n_max must be >= 1");
  MonicRecurrence r;
  r.family = Family::Meixner;
  r.K = K;
  r.q = q;
  r.A.resize(n_max + 1);
  r.B.resize(n_max + 1);
  const double p = 1.0 - q;
  for (int n = 0; n <= n_max; ++n) {
    r.A[n] = (n + (n + K) * q) / p;
    r.B[n] = static_cast<double>(n) * (n + K - 1.0) * q / (p * p);
  }
  // h_0 = sum_x w(x) = (1-q)^{-K}
  finish_norms(r, -K * std::log(p));
  return r;
}

/// A_n = 2n + alpha + 1, B_n = n (n + alpha).
inline MonicRecurrence laguerre_recurrence(double alpha, int n_max) {
  require(alpha >= 0.0, "alpha must be >= 0");
  require(n_max >= 1, "n_max must be >= 1");
  MonicRecurrence r;
  r.family = Family::Laguerre;
  r.alpha = alpha;
  r.A.resize(n_max + 1);
  r.B.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    r.A[n] = 2.0 * n + alpha + 1.0;
    r.B[n] = n * (n + alpha);
  }
  finish_norms(r, std::lgamma(alpha + 1.0));
  return r;
}

namespace detail {

/// Forward orthonormal recurrence. The recurrence runs on an unscaled
/// mantissa with a running log scale, so sqrt(w(x)) far below the double
/// range is carried exactly until the final product.
inline void forward_wavefunctions(const MonicRecurrence& rec, int count, double x, std::span<double> out) {
  const double log_w = rec.log_weight(x);
  if (!std::isfinite(log_w)) {
    for (int j = 0; j < count; ++j) out[j] = 0.0;
    return;
  }
  constexpr double kBig = 0x1.0p+400;
  constexpr double kLogBig = 400.0 * 0.69314718055994530942;
  double log_scale = 0.5 * (log_w - rec.log_norms[0]);
  double prev = 0.0;
  double cur = 1.0;
  for (int j = 0; j < count; ++j) {
    const double v = cur == 0.0 ? 0.0 : std::copysign(std::exp(std::log(std::abs(cur)) + log_scale), cur);
    if (!std::isfinite(v))
      throw numerical_error("wavefunction overflow at x = " + std::to_string(x));
    out[j] = v;
    if (j + 1 == count) break;
    const double next = ((x - rec.A[j]) * cur - (j > 0 ? std::sqrt(rec.B[j]) * prev : 0.0)) /
                        std::sqrt(rec.B[j + 1]);
    prev = cur;
    cur = next;
    if (std::abs(cur) > kBig) {
      cur /= kBig;
      prev /= kBig;
      log_scale += kLogBig;
    }
  }
}

}  // namespace detail

/// phi_j(x) for j = 0..count-1 at one point, written to `out`.
///
/// When j (1-q) > q (j+K-1) the degree-j Meixner ensemble packs every site of
/// [0, alpha_j), alpha_j = (sqrt j - sqrt(q (j+K-1)))^2/(1-q). At integer x
/// in that band phi_j(x) is the recessive solution of the recurrence and
/// forward evaluation loses every digit, so the self-duality
/// phi_j(x) = (-1)^{j+x} phi_x(j) is used instead: phi_x has degree x < j
/// and j lies where its recurrence is stable.
inline void wavefunctions_at(const MonicRecurrence& rec, int count, double x, std::span<double> out) {
  if (count - 1 > rec.n_max()) throw domain_error("recurrence too short for requested wavefunctions");
  detail::forward_wavefunctions(rec, count, x, out);
  if (rec.family != Family::Meixner || x < 0.0 || x != std::floor(x) || x > rec.n_max()) return;
  int first = count;
  for (int j = 1; j < count; ++j) {
    const double packed = std::sqrt(double(j)) - std::sqrt(rec.q * (j + rec.K - 1.0));
    if (packed > 0.0 && x < packed * packed / (1.0 - rec.q)) {
      first = j;
      break;
    }
  }
  if (first == count) return;
  const int deg = static_cast<int>(x);
  std::vector<double> dual(static_cast<std::size_t>(deg) + 1);
  for (int j = first; j < count; ++j) {
    detail::forward_wavefunctions(rec, deg + 1, static_cast<double>(j), dual);
    out[j] = (j + deg) % 2 == 0 ? dual[deg] : -dual[deg];
  }
}

/// Matrix of phi_j(x_i): one row per point, `count` columns.
inline Eigen::MatrixXd wavefunctions(const MonicRecurrence& rec, int count, std::span<const double> points) {
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(points.size()), count);
  std::vector<double> buf(count);
  for (std::size_t i = 0; i < points.size(); ++i) {
    wavefunctions_at(rec, count, points[i], buf);
    for (int j = 0; j < count; ++j) phi(static_cast<Eigen::Index>(i), j) = buf[j];
  }
  return phi;
}

/// K_N(x,x) = sum_{j<N} phi_j(x)^2.
inline double kernel_diagonal(const MonicRecurrence& rec, int N, double x) {
  std::vector<double> buf(N);
  wavefunctions_at(rec, N, x, buf);
  double s = 0.0;
  for (double v : buf) s += v * v;
  return s;
}

}  // namespace lpp
