#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace lpp {

/// Raised when an input lies outside an operation's mathematical domain.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a numerical procedure cannot reach its accuracy target
/// (truncation, quadrature or ODE integration failure).
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class not_implemented : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw domain_error(what);
}

inline void check_q(double q) {
  require(q > 0.0 && q < 1.0 && std::isfinite(q), "q must lie in (0,1), got " + std::to_string(q));
}

/// Configuration (q, M, N) of the geometric corner-growth model.
///
/// The lattice layer accepts any M, N >= 1. The orthogonal-polynomial layer
/// additionally relies on M >= N and swaps the pair when needed, since
/// G(M,N) and G(N,M) have the same law.
struct ModelParams {
  double q = 0.5;
  int M = 1;
  int N = 1;

  static ModelParams make(double q, int M, int N) {
    check_q(q);
    require(M >= 1 && N >= 1, "M and N must be positive");
    return ModelParams{q, M, N};
  }

  /// M = floor(gamma * N).
  static ModelParams from_aspect(double q, double gamma, int N) {
    require(gamma >= 1.0, "gamma must be >= 1");
    require(N >= 1, "N must be positive");
    return make(q, static_cast<int>(std::floor(gamma * N + 1e-9)), N);
  }

  double gamma() const { return static_cast<double>(M) / N; }

  /// Meixner parameter K = M - N + 1 after ordering M >= N.
  int meixner_K() const { return (M >= N ? M - N : N - M) + 1; }
  int rank() const { return M >= N ? N : M; }
};

}  // namespace lpp
