#pragma once

// Random environment, last-passage times, the corner-growth (Young diagram)
// process and its exclusion-process encoding.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "lpp/model.hpp"
#include "lpp/parallel.hpp"
#include "lpp/rng.hpp"

namespace lpp {

/// Dense M x N lattice with 1-based (i, j) addressing; i is the column
/// (x direction, 1..M) and j the row (y direction, 1..N).
template <class T>
class Grid {
 public:
  Grid() = default;
  Grid(int M, int N, T init = T{}) : M_(M), N_(N), data_(static_cast<std::size_t>(M) * N, init) {}

  int M() const { return M_; }
  int N() const { return N_; }

  T& operator()(int i, int j) { return data_[index(i, j)]; }
  const T& operator()(int i, int j) const { return data_[index(i, j)]; }

  std::span<const T> values() const { return data_; }
  bool operator==(const Grid&) const = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j - 1) * M_ + static_cast<std::size_t>(i - 1);
  }
  int M_ = 0;
  int N_ = 0;
  std::vector<T> data_;
};

enum class WeightKind { Geometric, GeometricStar, Exponential };

inline double draw_weight(WeightKind kind, double u, double log_q) {
  switch (kind) {
    case WeightKind::Geometric:
      return geometric_from_uniform(u, log_q);
    case WeightKind::GeometricStar:
      return geometric_from_uniform(u, log_q) + 1.0;
    case WeightKind::Exponential:
      return exponential_from_uniform(u);
  }
  return 0.0;
}

/// i.i.d. site weights. Entry (i, j) is a pure function of (seed, i, j).
struct WeightField {
  ModelParams params;
  WeightKind kind = WeightKind::Geometric;
  std::uint64_t seed = 0;
  Grid<double> entries;
};

inline WeightField sample_weights(const ModelParams& params, WeightKind kind, std::uint64_t seed) {
  check_q(params.q);
  require(params.M >= 1 && params.N >= 1, "M and N must be positive");
  WeightField field{params, kind, seed, Grid<double>(params.M, params.N)};
  const double log_q = std::log(params.q);
  for (int j = 1; j <= params.N; ++j)
    for (int i = 1; i <= params.M; ++i)
      field.entries(i, j) = draw_weight(kind, cell_uniform(seed, i, j), log_q);
  return field;
}

/// G(i,j) = w(i,j) + max(G(i-1,j), G(i,j-1)), out-of-grid terms zero.
template <class T>
Grid<T> last_passage(const Grid<T>& w) {
  Grid<T> g(w.M(), w.N());
  for (int j = 1; j <= w.N(); ++j) {
    for (int i = 1; i <= w.M(); ++i) {
      T best{};
      if (i > 1) best = g(i - 1, j);
      if (j > 1) best = std::max(best, g(i, j - 1));
      g(i, j) = w(i, j) + best;
    }
  }
  return g;
}

struct PassageGrid {
  ModelParams params;
  WeightKind kind = WeightKind::Geometric;
  Grid<double> values;

  double corner() const { return values(params.M, params.N); }
};

inline PassageGrid last_passage(const WeightField& weights) {
  return PassageGrid{weights.params, weights.kind, last_passage(weights.entries)};
}

/// G*(i,j) = G(i,j) + i + j - 1: every up/right path to (i,j) has i + j - 1 sites.
inline PassageGrid passage_star(const PassageGrid& grid) {
  require(grid.kind == WeightKind::Geometric, "passage_star expects a grid built from Geometric weights");
  PassageGrid out{grid.params, WeightKind::GeometricStar, grid.values};
  for (int j = 1; j <= grid.params.N; ++j)
    for (int i = 1; i <= grid.params.M; ++i) out.values(i, j) += i + j - 1;
  return out;
}

/// Fused sampler for G(M,N) (or H(M,N)) that never stores the weight field.
inline double sample_passage_time(const ModelParams& params, WeightKind kind, std::uint64_t key) {
  const double log_q = std::log(params.q);
  std::vector<double> row(static_cast<std::size_t>(params.M), 0.0);
  for (int j = 1; j <= params.N; ++j) {
    double left = 0.0;
    for (int i = 1; i <= params.M; ++i) {
      const double best = std::max(left, row[i - 1]);
      left = best + draw_weight(kind, cell_uniform(key, i, j), log_q);
      row[i - 1] = left;
    }
  }
  return row.back();
}

// ---------------------------------------------------------------------------
// Young diagrams

inline constexpr std::int64_t kForever = std::numeric_limits<std::int64_t>::max();

/// A(t) as the list of column heights lambda_1 >= lambda_2 >= ... > 0;
/// column k occupies [k-1,k] x [0, lambda_k].
struct YoungDiagramState {
  std::int64_t t = 0;
  std::vector<int> rows;

  int part(int k) const { return k >= 1 && k <= static_cast<int>(rows.size()) ? rows[k - 1] : 0; }
  int length() const { return static_cast<int>(rows.size()); }
  std::int64_t cells() const {
    std::int64_t n = 0;
    for (int r : rows) n += r;
    return n;
  }
  /// Whether lattice cell (i,j) (1-based, column i, level j) is in the diagram.
  bool contains(int i, int j) const { return j >= 1 && part(i) >= j; }

  bool valid() const {
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (rows[k] <= 0) return false;
      if (k > 0 && rows[k] > rows[k - 1]) return false;
    }
    return true;
  }

  /// lambda'_j = number of columns of height >= j.
  std::vector<int> conjugate() const {
    std::vector<int> out(rows.empty() ? 0 : static_cast<std::size_t>(rows.front()), 0);
    for (int r : rows)
      for (int j = 0; j < r; ++j) ++out[j];
    return out;
  }

  bool operator==(const YoungDiagramState&) const = default;
};

inline YoungDiagramState from_conjugate(std::int64_t t, const std::vector<int>& conj) {
  YoungDiagramState s{t, {}};
  for (std::size_t j = 0; j < conj.size(); ++j) {
    for (int k = 0; k < conj[j]; ++k) {
      if (static_cast<int>(s.rows.size()) <= k) s.rows.push_back(0);
      ++s.rows[k];
    }
  }
  return s;
}

/// A(t) = {(i,j) : G*(i,j) <= t} restricted to the grid's M x N box.
inline YoungDiagramState diagram_at(const PassageGrid& gstar, std::int64_t t) {
  require(t >= 0, "diagram time must be nonnegative");
  YoungDiagramState s{t, {}};
  const double limit = t == kForever ? std::numeric_limits<double>::infinity() : static_cast<double>(t);
  for (int i = 1; i <= gstar.params.M; ++i) {
    int h = 0;
    while (h < gstar.params.N && gstar.values(i, h + 1) <= limit) ++h;
    if (h == 0) break;
    s.rows.push_back(h);
  }
  return s;
}

/// Columns k whose next cell (k, lambda_k + 1) can be added keeping a diagram.
inline std::vector<int> addable_parts(const YoungDiagramState& s) {
  std::vector<int> out;
  const int r = s.length();
  for (int k = 1; k <= r + 1; ++k)
    if (k == 1 || s.part(k - 1) > s.part(k)) out.push_back(k);
  return out;
}

/// One step of the discrete-time growth: each addable cell joins independently
/// with probability 1 - q, all decisions taken against the current diagram.
inline YoungDiagramState grow_step(const YoungDiagramState& s, double q, CounterRng& rng) {
  YoungDiagramState next = s;
  next.t = s.t + 1;
  const double p = 1.0 - q;
  for (int k : addable_parts(s)) {
    if (!rng.bernoulli(p)) continue;
    if (k > next.length())
      next.rows.push_back(1);
    else
      ++next.rows[k - 1];
  }
  return next;
}

/// First time the growth chain adds cell (M,N); equal in law to G*(M,N).
inline std::int64_t growth_hitting_time(int M, int N, double q, CounterRng& rng,
                                        std::int64_t max_steps = 100'000'000) {
  YoungDiagramState s;
  while (s.part(M) < N) {
    if (s.t >= max_steps) throw numerical_error("growth chain exceeded step budget");
    s = grow_step(s, q, rng);
  }
  return s.t;
}

// ---------------------------------------------------------------------------
// Exclusion process view

/// Occupations on [k_lo, k_hi]; every site left of the window is occupied and
/// every site right of it is empty.
struct TasepConfig {
  std::int64_t t = 0;
  std::int64_t k_lo = 1;
  std::int64_t k_hi = 0;
  std::vector<std::uint8_t> occupation;

  bool occupied(std::int64_t k) const {
    if (k < k_lo) return true;
    if (k > k_hi) return false;
    return occupation[static_cast<std::size_t>(k - k_lo)] != 0;
  }

  /// Position of the n-th particle counted from the right (n = 0 is the front).
  std::int64_t particle(std::int64_t n) const {
    std::int64_t seen = 0;
    for (std::int64_t k = k_hi; k >= k_lo; --k) {
      if (occupied(k)) {
        if (seen == n) return k;
        ++seen;
      }
    }
    return k_lo - 1 - (n - seen);
  }

  bool operator==(const TasepConfig&) const = default;
};

/// Smallest window that captures all irregularity of the diagram's boundary.
inline std::pair<std::int64_t, std::int64_t> tasep_window(const YoungDiagramState& s) {
  return {1 - static_cast<std::int64_t>(s.part(1)), static_cast<std::int64_t>(s.length())};
}

/// Reads the boundary of A(t) from the y-axis arm to the x-axis arm: a unit
/// vertical step is a particle, a horizontal step a hole. The step ending on
/// the lattice point (x, y) gets site x - y, so the last step before the
/// diagonal x = y is site 0. Particle n (from the right) sits at lambda'_{n+1} - n.
inline TasepConfig tasep_encode(const YoungDiagramState& s, std::int64_t k_lo, std::int64_t k_hi) {
  const auto [need_lo, need_hi] = tasep_window(s);
  if (k_lo > need_lo || k_hi < need_hi || k_lo > k_hi + 1)
    throw domain_error("TASEP window too small for the diagram");
  TasepConfig c{s.t, k_lo, k_hi, std::vector<std::uint8_t>(static_cast<std::size_t>(k_hi - k_lo + 1), 0)};
  const auto conj = s.conjugate();
  for (std::int64_t n = 0;; ++n) {
    const std::int64_t height = n < static_cast<std::int64_t>(conj.size()) ? conj[n] : 0;
    const std::int64_t pos = height - n;
    if (pos < k_lo) break;
    c.occupation[static_cast<std::size_t>(pos - k_lo)] = 1;
  }
  return c;
}

inline TasepConfig tasep_encode(const YoungDiagramState& s) {
  const auto [lo, hi] = tasep_window(s);
  return tasep_encode(s, lo, hi);
}

inline YoungDiagramState tasep_decode(const TasepConfig& c) {
  std::vector<std::int64_t> particles;
  for (std::int64_t k = c.k_hi; k >= c.k_lo; --k)
    if (c.occupied(k)) particles.push_back(k);
  if (static_cast<std::int64_t>(particles.size()) != 1 - c.k_lo)
    throw domain_error("configuration is not reachable from the step initial condition");
  std::vector<int> conj;
  for (std::size_t n = 0; n < particles.size(); ++n) {
    const std::int64_t h = particles[n] + static_cast<std::int64_t>(n);
    if (h <= 0) break;
    conj.push_back(static_cast<int>(h));
  }
  return from_conjugate(c.t, conj);
}

/// Synchronous discrete-time TASEP step: every particle whose right
/// neighbour is empty jumps with probability 1 - q.
inline TasepConfig tasep_step_discrete(const TasepConfig& c, double q, CounterRng& rng) {
  TasepConfig cur = c;
  if (cur.k_lo > cur.k_hi || !cur.occupied(cur.k_lo)) {
    cur.occupation.insert(cur.occupation.begin(), 1);
    --cur.k_lo;
  }
  if (cur.occupied(cur.k_hi)) {
    cur.occupation.push_back(0);
    ++cur.k_hi;
  }
  TasepConfig next = cur;
  next.t = c.t + 1;
  const double p = 1.0 - q;
  for (std::int64_t k = cur.k_lo; k < cur.k_hi; ++k) {
    if (cur.occupied(k) && !cur.occupied(k + 1) && rng.bernoulli(p)) {
      next.occupation[static_cast<std::size_t>(k - cur.k_lo)] = 0;
      next.occupation[static_cast<std::size_t>(k + 1 - cur.k_lo)] = 1;
    }
  }
  return next;
}

inline TasepConfig tasep_step_initial() { return TasepConfig{0, 1, 0, {}}; }

// ---------------------------------------------------------------------------
// Continuous-time TASEP current through exponential passage times

/// Sample of Y(floor(u t), t), the number of particles strictly right of
/// floor(u t) at time t for the rate-one TASEP from the step profile.
/// Uses Y > m  <=>  H(m + k + 1, m + 1) <= t on the exponential environment `seed`.
inline std::int64_t current_Y(double u, double t, std::uint64_t seed) {
  require(u >= 0.0 && u < 1.0, "u must lie in [0,1)");
  require(t >= 0.0, "t must be nonnegative");
  if (t == 0.0) return 0;
  const std::int64_t k = static_cast<std::int64_t>(std::floor(u * t));
  const double center = t * (1.0 - u) * (1.0 - u) / 4.0;
  std::int64_t L = static_cast<std::int64_t>(center + 8.0 * std::cbrt(t) + 16.0);
  for (;;) {
    const std::int64_t cols = L + k + 1;
    std::vector<double> row(static_cast<std::size_t>(cols), 0.0);
    for (std::int64_t m = 0; m <= L; ++m) {
      const std::int64_t j = m + 1;
      double left = 0.0;
      for (std::int64_t i = 1; i <= cols; ++i) {
        const double best = std::max(left, row[i - 1]);
        left = best + exponential_from_uniform(cell_uniform(seed, static_cast<std::uint64_t>(i),
                                                            static_cast<std::uint64_t>(j)));
        row[i - 1] = left;
      }
      if (row[static_cast<std::size_t>(m + k)] > t) return m;
    }
    L *= 2;
  }
}

// ---------------------------------------------------------------------------
// Monte Carlo batches

struct SampleBatch {
  ModelParams params;
  WeightKind kind = WeightKind::Geometric;
  std::uint64_t seed = 0;
  double omega = 0.0;  // centering per unit N
  double sigma = 1.0;  // fluctuation scale in units of N^{1/3}
  std::vector<double> raw;
  std::vector<double> rescaled;

  double scale() const { return sigma * std::cbrt(static_cast<double>(params.N)); }
  double center() const { return omega * params.N; }
  double rescale(double g) const { return (g - center()) / scale(); }
  double unscale(double s) const { return center() + scale() * s; }
};

inline std::uint64_t sample_key(std::uint64_t seed, std::uint64_t index) {
  return derive_key(seed, index, 0xC0FFEE);
}

/// n independent draws of G(M,N) (or H(M,N)); sample i uses environment
/// sample_key(seed, i), so output is independent of the thread count.
inline SampleBatch monte_carlo_batch(const ModelParams& params, WeightKind kind, std::size_t n_samples,
                                     std::uint64_t seed, double omega, double sigma,
                                     unsigned threads = 1) {
  check_q(params.q);
  require(sigma > 0.0, "sigma must be positive");
  SampleBatch batch{params, kind, seed, omega, sigma, std::vector<double>(n_samples),
                    std::vector<double>(n_samples)};
  parallel_for(n_samples, threads, [&](std::size_t i) {
    batch.raw[i] = sample_passage_time(params, kind, sample_key(seed, i));
  });
  for (std::size_t i = 0; i < n_samples; ++i) batch.rescaled[i] = batch.rescale(batch.raw[i]);
  return batch;
}

}  // namespace lpp
