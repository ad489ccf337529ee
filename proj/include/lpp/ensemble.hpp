#pragma once

// Exact finite-N laws of G(M,N) and H(M,N) as Fredholm determinants of the
// Meixner and Laguerre Christoffel-Darboux kernels, plus a brute-force
// summation of the Meixner ensemble for N <= 3.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "lpp/model.hpp"
#include "lpp/orthopoly.hpp"
#include "lpp/quadrature.hpp"

namespace lpp {

enum class CdfMethod { Fredholm, BruteForce, ClosedForm };

inline const char* to_string(CdfMethod m) {
  switch (m) {
    case CdfMethod::Fredholm:
      return "fredholm";
    case CdfMethod::BruteForce:
      return "brute_force";
    case CdfMethod::ClosedForm:
      return "closed_form";
  }
  return "?";
}

/// A probability with an attached truncation/quadrature error bound.
struct CdfValue {
  double t = 0.0;
  double p = 0.0;
  double err = 0.0;
  CdfMethod method = CdfMethod::Fredholm;
};

/// Clamps p into [0,1] when the excursion is explained by err; a larger
/// excursion means the determinant is wrong and is reported.
inline double settle_probability(double p, double err) {
  const double slack = err + 1e-13;
  if (p < -slack || p > 1.0 + slack)
    throw numerical_error("determinant " + std::to_string(p) + " outside [0,1] beyond its error bound");
  return std::clamp(p, 0.0, 1.0);
}

/// Upper bound for the zeros of p_n, n <= count, from Gershgorin discs of the Jacobi matrix.
inline double zero_bound(const MonicRecurrence& rec, int count) {
  double edge = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < count; ++n) {
    const double lower = n > 0 ? std::sqrt(rec.B[n]) : 0.0;
    const double upper = n + 1 < count ? std::sqrt(rec.B[n + 1]) : 0.0;
    edge = std::max(edge, rec.A[n] + lower + upper);
  }
  return edge;
}

// ---------------------------------------------------------------------------
// Meixner

struct KernelWindow {
  std::int64_t offset = 0;     // first evaluation point
  std::vector<double> points;  // evaluation nodes
  Eigen::MatrixXd values;      // K_N(x_i, x_j)
  double trace_tail_bound = 0.0;

  Eigen::Index size() const { return values.rows(); }
};

struct MeixnerSetup {
  int N;
  int K;
  double q;
  MonicRecurrence rec;
  double edge;  // no zero of p_0..p_N lies above this point

  explicit MeixnerSetup(const ModelParams& params)
      : N(params.rank()),
        K(params.meixner_K()),
        q(params.q),
        rec(meixner_recurrence(K, params.q, std::max(N, 1))),
        edge(zero_bound(rec, N)) {}
};

/// Bound on sum_{x > cutoff} K_N(x,x) for the Meixner kernel.
///
/// Beyond every zero of p_0..p_{N-1}, each ratio phi_j(x+1)^2/phi_j(x)^2 is
/// decreasing in x, so R = max_j of that ratio at cutoff+1 dominates every
/// later ratio of K_N(x,x) and the tail is at most K(c+1,c+1)/(1-R).
/// Returns +inf while the cutoff is still inside the bulk.
inline double tail_truncation_bound(const MeixnerSetup& s, std::int64_t cutoff) {
  if (static_cast<double>(cutoff) + 1.0 <= s.edge) return std::numeric_limits<double>::infinity();
  std::vector<double> a(s.N), b(s.N);
  wavefunctions_at(s.rec, s.N, static_cast<double>(cutoff + 1), a);
  wavefunctions_at(s.rec, s.N, static_cast<double>(cutoff + 2), b);
  double diag = 0.0, ratio = 0.0;
  for (int j = 0; j < s.N; ++j) {
    diag += a[j] * a[j];
    if (a[j] != 0.0) ratio = std::max(ratio, (b[j] * b[j]) / (a[j] * a[j]));
  }
  if (diag == 0.0) return 0.0;
  if (!(ratio < 1.0)) return std::numeric_limits<double>::infinity();
  return diag / (1.0 - ratio);
}

inline double tail_truncation_bound(const ModelParams& params, std::int64_t cutoff) {
  return tail_truncation_bound(MeixnerSetup(params), cutoff);
}

/// Smallest cutoff >= start (coarsely searched) whose tail bound is <= tol.
inline std::int64_t meixner_cutoff(const MeixnerSetup& s, std::int64_t start, double tol) {
  std::int64_t c = std::max<std::int64_t>(start, static_cast<std::int64_t>(std::ceil(s.edge)));
  std::int64_t step = 8;
  for (int it = 0; it < 200; ++it) {
    if (tail_truncation_bound(s, c) <= tol) return c;
    c += step;
    step = std::max<std::int64_t>(step, c / 8);
  }
  throw numerical_error("Meixner tail bound cannot reach tolerance " + std::to_string(tol));
}

enum class KernelForm { ChristoffelDarboux, SumOfSquares };

/// K_N on the integer window [lo, hi]. Off-diagonal entries use the
/// Christoffel-Darboux quotient sqrt(B_N) (phi_N(x)phi_{N-1}(y) - phi_{N-1}(x)phi_N(y))/(x-y)
/// unless SumOfSquares is requested; the diagonal always uses sum_j phi_j(x)^2.
inline KernelWindow meixner_kernel(const MeixnerSetup& s, std::int64_t lo, std::int64_t hi,
                                   KernelForm form = KernelForm::ChristoffelDarboux) {
  require(lo >= 0 && hi >= lo, "Meixner window must satisfy 0 <= lo <= hi");
  const auto n = static_cast<Eigen::Index>(hi - lo + 1);
  KernelWindow w;
  w.offset = lo;
  w.points.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) w.points[i] = static_cast<double>(lo + i);
  const MonicRecurrence rec = s.rec.n_max() >= s.N ? s.rec : meixner_recurrence(s.K, s.q, s.N);
  const Eigen::MatrixXd phi = wavefunctions(rec, s.N + 1, w.points);
  const Eigen::MatrixXd low = phi.leftCols(s.N);
  w.values.resize(n, n);
  if (form == KernelForm::SumOfSquares) {
    w.values = low * low.transpose();
  } else {
    const double ratio = std::sqrt(rec.B[s.N]);
    for (Eigen::Index i = 0; i < n; ++i) {
      w.values(i, i) = low.row(i).squaredNorm();
      for (Eigen::Index j = 0; j < i; ++j) {
        const double num = phi(i, s.N) * phi(j, s.N - 1) - phi(i, s.N - 1) * phi(j, s.N);
        const double v = ratio * num / (w.points[i] - w.points[j]);
        w.values(i, j) = v;
        w.values(j, i) = v;
      }
    }
  }
  w.trace_tail_bound = tail_truncation_bound(s, hi);
  return w;
}

inline KernelWindow meixner_kernel(const ModelParams& params, std::int64_t lo, std::int64_t hi,
                                   KernelForm form = KernelForm::ChristoffelDarboux) {
  return meixner_kernel(MeixnerSetup(params), lo, hi, form);
}

/// det(I - K) restricted to the trailing block starting at index `from`.
inline double fredholm_det_trailing(const KernelWindow& w, Eigen::Index from) {
  const Eigen::Index m = w.size() - from;
  if (m <= 0) return 1.0;
  Eigen::MatrixXd a = -w.values.bottomRightCorner(m, m);
  a.diagonal().array() += 1.0;
  return Eigen::PartialPivLU<Eigen::MatrixXd>(a).determinant();
}

struct MeixnerOptions {
  double tol = 1e-13;          // target for the truncated kernel mass
  std::int64_t dense_limit = 1500;  // largest window factorized densely
};

/// Distribution function of G(M,N) from the Meixner ensemble:
/// P[G <= t] = det(I - K_N) on {t+N, t+N+1, ...}.
///
/// Windows up to `dense_limit` points are factorized directly. For wider
/// windows the same determinant is evaluated through its rank-N form
/// det(sum_{x < t+N} phi(x) phi(x)^T), which needs no truncation.
class MeixnerEnsemble {
 public:
  explicit MeixnerEnsemble(const ModelParams& params, MeixnerOptions opts = {})
      : params_(params), setup_(params), opts_(opts) {
    check_q(params.q);
  }

  const MeixnerSetup& setup() const { return setup_; }
  const ModelParams& params() const { return params_; }

  CdfValue cdf(std::int64_t t) const { return table(t, t).front(); }

  /// P[G <= t] for every integer t in [t_lo, t_hi].
  std::vector<CdfValue> table(std::int64_t t_lo, std::int64_t t_hi) const {
    require(t_hi >= t_lo, "empty threshold range");
    std::vector<CdfValue> out;
    out.reserve(static_cast<std::size_t>(t_hi - t_lo + 1));
    const std::int64_t first = std::max<std::int64_t>(t_lo, 0);
    for (std::int64_t t = t_lo; t < first && t <= t_hi; ++t)
      out.push_back({static_cast<double>(t), 0.0, 0.0, CdfMethod::Fredholm});
    if (first > t_hi) return out;

    const std::int64_t lo = first + setup_.N;
    const std::int64_t hi = std::max(meixner_cutoff(setup_, lo, opts_.tol), lo);
    if (hi - lo + 1 <= opts_.dense_limit) {
      const KernelWindow w = meixner_kernel(setup_, lo, hi);
      for (std::int64_t t = first; t <= t_hi; ++t) {
        const Eigen::Index from = static_cast<Eigen::Index>(t + setup_.N - lo);
        const double tail = from < w.size() ? w.trace_tail_bound : tail_truncation_bound(setup_, t + setup_.N - 1);
        const double err = tail + 1e-14 * static_cast<double>(std::max<Eigen::Index>(w.size() - from, 1));
        out.push_back({static_cast<double>(t), settle_probability(fredholm_det_trailing(w, from), err), err,
                       CdfMethod::Fredholm});
      }
    } else {
      // Running Gram matrix over {0, ..., s-1}.
      Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(setup_.N, setup_.N);
      std::vector<double> phi(setup_.N);
      Eigen::Map<Eigen::VectorXd> v(phi.data(), setup_.N);
      std::int64_t x = 0;
      for (std::int64_t t = first; t <= t_hi; ++t) {
        for (; x < t + setup_.N; ++x) {
          wavefunctions_at(setup_.rec, setup_.N, static_cast<double>(x), phi);
          gram.noalias() += v * v.transpose();
        }
        const double err = 1e-14 * static_cast<double>(x) * setup_.N;
        const double det = Eigen::PartialPivLU<Eigen::MatrixXd>(gram).determinant();
        out.push_back({static_cast<double>(t), settle_probability(det, err), err, CdfMethod::Fredholm});
      }
    }
    return out;
  }

 private:
  ModelParams params_;
  MeixnerSetup setup_;
  MeixnerOptions opts_;
};

/// P[G(M,N) <= t]. Real thresholds map to floor(t).
inline CdfValue exact_cdf_meixner(const ModelParams& params, double t, MeixnerOptions opts = {}) {
  require(t >= -1.0, "threshold must be >= -1");
  CdfValue v = MeixnerEnsemble(params, opts).cdf(static_cast<std::int64_t>(std::floor(t)));
  v.t = t;
  return v;
}

// ---------------------------------------------------------------------------
// Brute-force summation of the Meixner ensemble (oracle, N <= 3)

enum class Summation { Ordered, Unordered };

struct BruteForceTable {
  std::vector<double> cdf_by_max;  // P[max h <= m], m = 0..cutoff
  double shell_fraction = 0.0;     // mass with max h in (cutoff/2, cutoff]
};

/// Sums prod_{i<j}(h_i-h_j)^2 prod_i C(h_i+M-N, h_i) q^{h_i} over {0..cutoff}^N,
/// binned by max h and normalized by the unrestricted sum.
inline BruteForceTable brute_force_table(const ModelParams& params, int cutoff,
                                         Summation mode = Summation::Ordered) {
  const int N = params.rank();
  const int K = params.meixner_K();
  if (N > 3) throw domain_error("brute force summation supports N <= 3 only");
  require(cutoff >= N, "cutoff too small");
  check_q(params.q);
  std::vector<double> w(static_cast<std::size_t>(cutoff) + 1);
  w[0] = 1.0;
  for (int x = 0; x < cutoff; ++x) w[x + 1] = w[x] * params.q * (x + K) / (x + 1.0);

  std::vector<double> mass(static_cast<std::size_t>(cutoff) + 1, 0.0);
  if (N == 1) {
    for (int a = 0; a <= cutoff; ++a) mass[a] += w[a];
  } else if (N == 2) {
    if (mode == Summation::Ordered) {
      for (int a = 1; a <= cutoff; ++a)
        for (int b = 0; b < a; ++b) mass[a] += 2.0 * w[a] * w[b] * double(a - b) * (a - b);
    } else {
      for (int a = 0; a <= cutoff; ++a)
        for (int b = 0; b <= cutoff; ++b) mass[std::max(a, b)] += w[a] * w[b] * double(a - b) * (a - b);
    }
  } else {
    if (mode == Summation::Ordered) {
      for (int a = 2; a <= cutoff; ++a)
        for (int b = 1; b < a; ++b)
          for (int c = 0; c < b; ++c) {
            const double v = double(a - b) * (a - c) * (b - c);
            mass[a] += 6.0 * w[a] * w[b] * w[c] * v * v;
          }
    } else {
      for (int a = 0; a <= cutoff; ++a)
        for (int b = 0; b <= cutoff; ++b)
          for (int c = 0; c <= cutoff; ++c) {
            const double v = double(a - b) * (a - c) * (b - c);
            mass[std::max({a, b, c})] += w[a] * w[b] * w[c] * v * v;
          }
    }
  }
  BruteForceTable out;
  out.cdf_by_max.resize(mass.size());
  double total = 0.0;
  for (double m : mass) total += m;
  double run = 0.0, shell = 0.0;
  for (std::size_t m = 0; m < mass.size(); ++m) {
    run += mass[m];
    out.cdf_by_max[m] = run / total;
    if (2 * m > static_cast<std::size_t>(cutoff)) shell += mass[m];
  }
  out.shell_fraction = shell / total;
  return out;
}

/// P[G(M,N) <= t] = P[max h <= t + N - 1] under the Meixner ensemble.
inline CdfValue brute_force_cdf(const ModelParams& params, std::int64_t t, int cutoff,
                                Summation mode = Summation::Ordered) {
  const BruteForceTable tab = brute_force_table(params, cutoff, mode);
  const std::int64_t m = t + params.rank() - 1;
  double p = 0.0;
  if (m >= static_cast<std::int64_t>(tab.cdf_by_max.size()))
    p = 1.0;
  else if (m >= 0)
    p = tab.cdf_by_max[static_cast<std::size_t>(m)];
  return {static_cast<double>(t), p, tab.shell_fraction, CdfMethod::BruteForce};
}

/// Doubles the cutoff until the outer shell carries less than `eps` of the mass.
inline int brute_force_cutoff(const ModelParams& params, double eps = 1e-15) {
  for (int c = 32; c <= 4096; c *= 2)
    if (brute_force_table(params, c).shell_fraction < eps) return c;
  throw numerical_error("brute force cutoff did not converge");
}

// ---------------------------------------------------------------------------
// Laguerre

/// Bound on the integral over [cutoff, inf) of the Laguerre kernel diagonal.
/// Past every zero z <= z_max the log-derivative of each phi_j^2 is at most
/// g(x) = 2(N-1)/(x - z_max) + alpha/x - 1, which decreases in x, so the tail
/// is at most K_N(c,c)/(-g(c)) once g(c) < 0.
inline double laguerre_tail_bound(const MonicRecurrence& rec, int N, double cutoff) {
  const double zmax = zero_bound(rec, N);
  if (cutoff <= zmax) return std::numeric_limits<double>::infinity();
  const double g = 2.0 * (N - 1) / (cutoff - zmax) + rec.alpha / cutoff - 1.0;
  if (!(g < 0.0)) return std::numeric_limits<double>::infinity();
  return kernel_diagonal(rec, N, cutoff) / (-g);
}

struct LaguerreOptions {
  double tail_tol = 1e-13;
  double tol = 1e-8;  // node-doubling stopping rule on |dF|
  int min_nodes = 8;
  int max_nodes = 256;
};

/// Nystrom value of det(I - K) on [a, b] with `panels` x `m` Gauss-Legendre
/// nodes, symmetrized by square-root weights. The kernel has rank N, so the
/// n x n determinant is evaluated as the equal N x N one, det(I - Phi^T W Phi).
inline double laguerre_nystrom_det(const MonicRecurrence& rec, int N, double a, double b, int panels, int m) {
  const QuadratureRule r = composite_gauss_legendre(a, b, panels, m);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(N, N);
  std::vector<double> phi(N);
  Eigen::Map<Eigen::VectorXd> v(phi.data(), N);
  for (std::size_t k = 0; k < r.size(); ++k) {
    wavefunctions_at(rec, N, r.nodes[k], phi);
    gram.noalias() += r.weights[k] * (v * v.transpose());
  }
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(N, N) - gram;
  return Eigen::PartialPivLU<Eigen::MatrixXd>(id).determinant();
}

/// P[H(M,N) <= t] = det(I - K_N^alpha) on L^2[t, inf), alpha = |M - N|.
inline CdfValue exact_cdf_laguerre(int M, int N, double t, LaguerreOptions opts = {}) {
  require(M >= 1 && N >= 1, "M and N must be positive");
  require(t >= 0.0, "threshold must be >= 0");
  if (t == 0.0) return {t, 0.0, 0.0, CdfMethod::Fredholm};
  const int n = std::min(M, N);
  const double alpha = std::abs(M - N);
  const MonicRecurrence rec = laguerre_recurrence(alpha, std::max(n, 1));
  double upper = std::max(t, zero_bound(rec, n)) + 1.0;
  for (double step = 1.0; laguerre_tail_bound(rec, n, upper) > opts.tail_tol; step *= 1.25) {
    upper += step;
    if (upper > 1e7) throw numerical_error("Laguerre tail bound does not converge");
  }
  const double tail = laguerre_tail_bound(rec, n, upper);
  if (upper <= t) return {t, 1.0, tail, CdfMethod::Fredholm};
  const int panels = std::max(1, static_cast<int>(std::ceil((upper - t) / 2.0)));
  double prev = laguerre_nystrom_det(rec, n, t, upper, panels, opts.min_nodes);
  for (int m = 2 * opts.min_nodes; m <= opts.max_nodes; m *= 2) {
    const double cur = laguerre_nystrom_det(rec, n, t, upper, panels, m);
    const double delta = std::abs(cur - prev);
    if (delta < opts.tol) {
      const double err = delta + tail;
      return {t, settle_probability(cur, err), err, CdfMethod::Fredholm};
    }
    prev = cur;
  }
  throw numerical_error("Laguerre Nystrom quadrature did not converge at t = " + std::to_string(t));
}

}  // namespace lpp
