#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "lpp/asymptotics.hpp"
#include "lpp/ensemble.hpp"
#include "lpp/growth.hpp"
#include "lpp/stats.hpp"

using namespace lpp;

namespace {

// Max over all up/right paths by explicit enumeration.
double path_max(const Grid<double>& w) {
  double best = -1.0;
  std::function<void(int, int, double)> walk = [&](int i, int j, double acc) {
    acc += w(i, j);
    if (i == w.M() && j == w.N()) {
      best = std::max(best, acc);
      return;
    }
    if (i < w.M()) walk(i + 1, j, acc);
    if (j < w.N()) walk(i, j + 1, acc);
  };
  walk(1, 1, 0.0);
  return best;
}

}  // namespace

TEST(Weights, NearZeroQGivesZeros) {
  const auto f = sample_weights(ModelParams::make(1e-12, 40, 40), WeightKind::Geometric, 3);
  for (double v : f.entries.values()) EXPECT_EQ(v, 0.0);
}

TEST(Weights, PooledMeanMatchesGeometric) {
  const double q = 0.6;
  double sum = 0.0;
  std::size_t n = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto f = sample_weights(ModelParams::make(q, 20, 20), WeightKind::Geometric, seed);
    for (double v : f.entries.values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_EQ(v, std::floor(v));
      sum += v;
      ++n;
    }
  }
  const double mu = q / (1 - q), se = std::sqrt(q / ((1 - q) * (1 - q)) / n);
  EXPECT_NEAR(sum / n, mu, 3 * se);
}

TEST(Weights, SameSeedSameField) {
  const auto p = ModelParams::make(0.5, 7, 5);
  const auto a = sample_weights(p, WeightKind::Geometric, 99);
  const auto b = sample_weights(p, WeightKind::Geometric, 99);
  const auto c = sample_weights(p, WeightKind::Geometric, 100);
  EXPECT_TRUE(std::ranges::equal(a.entries.values(), b.entries.values()));
  EXPECT_FALSE(std::ranges::equal(a.entries.values(), c.entries.values()));
}

TEST(Weights, StarWeightsShiftByOne) {
  const auto p = ModelParams::make(0.4, 6, 6);
  const auto g = sample_weights(p, WeightKind::Geometric, 8);
  const auto s = sample_weights(p, WeightKind::GeometricStar, 8);
  for (int i = 1; i <= 6; ++i)
    for (int j = 1; j <= 6; ++j) EXPECT_EQ(s.entries(i, j), g.entries(i, j) + 1);
}

TEST(LastPassage, TwoByTwoExample) {
  Grid<double> w(2, 2);
  w(1, 1) = 1;
  w(2, 1) = 4;
  w(1, 2) = 0;
  w(2, 2) = 3;
  const auto g = last_passage(w);
  EXPECT_EQ(g(2, 2), 8);
  PassageGrid pg{ModelParams::make(0.5, 2, 2), WeightKind::Geometric, g};
  EXPECT_EQ(passage_star(pg).corner(), 11);
}

TEST(LastPassage, MatchesPathEnumeration) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int M = 1 + seed % 5, N = 1 + (seed / 5) % 4;
    const auto f = sample_weights(ModelParams::make(0.55, M, N), WeightKind::Geometric, seed);
    EXPECT_EQ(last_passage(f).corner(), path_max(f.entries)) << M << "x" << N;
  }
}

TEST(LastPassage, MonotoneUnderWeightIncrease) {
  const auto f = sample_weights(ModelParams::make(0.5, 9, 7), WeightKind::Geometric, 17);
  const auto g0 = last_passage(f.entries);
  auto bumped = f.entries;
  for (int i = 1; i <= 9; i += 2) bumped(i, 1 + i % 7) += 3;
  const auto g1 = last_passage(bumped);
  for (int i = 1; i <= 9; ++i)
    for (int j = 1; j <= 7; ++j) EXPECT_GE(g1(i, j), g0(i, j));
}

TEST(LastPassage, StarEqualsDpOnShiftedWeights) {
  const auto p = ModelParams::make(0.5, 8, 6);
  const auto star = passage_star(last_passage(sample_weights(p, WeightKind::Geometric, 4)));
  const auto direct = last_passage(sample_weights(p, WeightKind::GeometricStar, 4));
  EXPECT_TRUE(std::ranges::equal(star.values.values(), direct.values.values()));
}

TEST(LastPassage, FusedSamplerAgreesWithGrid) {
  for (auto kind : {WeightKind::Geometric, WeightKind::Exponential}) {
    const auto p = ModelParams::make(0.45, 11, 7);
    for (std::uint64_t key = 0; key < 5; ++key)
      EXPECT_EQ(sample_passage_time(p, kind, key), last_passage(sample_weights(p, kind, key)).corner());
  }
}

TEST(Diagram, EndpointsAndInclusion) {
  const auto p = ModelParams::make(0.5, 6, 5);
  const auto star = passage_star(last_passage(sample_weights(p, WeightKind::Geometric, 12)));
  EXPECT_EQ(diagram_at(star, 0).cells(), 0);
  const auto full = diagram_at(star, kForever);
  EXPECT_EQ(full.cells(), 30);
  EXPECT_EQ(full.rows, std::vector<int>(6, 5));
  auto prev = diagram_at(star, 0);
  for (std::int64_t t = 1; t <= static_cast<std::int64_t>(star.corner()); ++t) {
    const auto cur = diagram_at(star, t);
    EXPECT_TRUE(cur.valid());
    for (int i = 1; i <= 6; ++i) EXPECT_GE(cur.part(i), prev.part(i));
    prev = cur;
  }
  EXPECT_EQ(prev.rows, diagram_at(star, kForever).rows);
}

TEST(Diagram, SingleCellAppearsAtThree) {
  PassageGrid g{ModelParams::make(0.5, 1, 1), WeightKind::GeometricStar, Grid<double>(1, 1, 3.0)};
  EXPECT_EQ(diagram_at(g, 2).cells(), 0);
  EXPECT_EQ(diagram_at(g, 3).cells(), 1);
}

TEST(Growth, AddableCells) {
  EXPECT_EQ(addable_parts(YoungDiagramState{}), std::vector<int>{1});
  // lambda = (2): next cells are (1,3) on top of column 1 and (2,1).
  const YoungDiagramState two{0, {2}};
  EXPECT_EQ(addable_parts(two), (std::vector<int>{1, 2}));
  const YoungDiagramState stair{0, {3, 2, 2}};
  EXPECT_EQ(addable_parts(stair), (std::vector<int>{1, 2, 4}));
}

TEST(Growth, EmptyStepFrequency) {
  const double q = 0.35;
  const int n = 100000;
  CounterRng rng(77);
  int hits = 0;
  for (int k = 0; k < n; ++k) hits += grow_step(YoungDiagramState{}, q, rng).cells() == 1;
  EXPECT_NEAR(double(hits) / n, 1 - q, 3 * binomial_se(1 - q, n));
}

TEST(Growth, StepsOnlyAddAddableCells) {
  CounterRng rng(5);
  YoungDiagramState s;
  for (int step = 0; step < 300; ++step) {
    const auto next = grow_step(s, 0.6, rng);
    ASSERT_TRUE(next.valid());
    const auto add = addable_parts(s);
    for (int k = 1; k <= std::max(next.length(), s.length()); ++k) {
      const int d = next.part(k) - s.part(k);
      ASSERT_TRUE(d == 0 || (d == 1 && std::ranges::count(add, k) == 1));
    }
    s = next;
  }
}

TEST(Growth, NearOneQFreezes) {
  CounterRng rng(1);
  const YoungDiagramState s{0, {3, 1}};
  for (int k = 0; k < 1000; ++k) EXPECT_EQ(grow_step(s, 1 - 1e-12, rng).rows, s.rows);
}

TEST(Growth, HittingTimeHasPassageLaw) {
  const auto p = ModelParams::make(0.5, 2, 2);
  const int n = 10000;
  CounterRng rng(2024);
  std::vector<double> hit(n);
  for (auto& h : hit) h = double(growth_hitting_time(2, 2, p.q, rng));
  // G*(2,2) = G(2,2) + 3.
  const MeixnerEnsemble ens(p);
  const double d = ks_integer(hit, [&](std::int64_t t) { return ens.cdf(t - 3).p; });
  EXPECT_LE(d, dkw_bound(n));
}

namespace {

// Counts grid points of (1-eps) A0 missing from A(t)/t and points of A(t)/t
// outside (1+eps) A0.
std::pair<int, int> sandwich_violations(double q, double eps, std::int64_t t, std::uint64_t seed) {
  const int side = static_cast<int>(0.6 * t) + 2;
  const auto star =
      passage_star(last_passage(sample_weights(ModelParams::make(q, side, side), WeightKind::Geometric, seed)));
  const auto a = diagram_at(star, t);
  EXPECT_LT(a.part(1), side);
  EXPECT_LT(a.length(), side);
  int inner = 0, outer = 0;
  for (double x = 0.005; x < 0.6; x += 0.01)
    for (double y = 0.005; y < 0.6; y += 0.01) {
      const bool in_a = a.contains(int(std::floor(x * t)) + 1, int(std::floor(y * t)) + 1);
      inner += shape_contains(x / (1 - eps), y / (1 - eps), q) && !in_a;
      outer += in_a && !shape_contains(x / (1 + eps), y / (1 + eps), q);
    }
  return {inner, outer};
}

}  // namespace

TEST(Growth, ShapeInnerInclusionAtT400) {
  EXPECT_EQ(sandwich_violations(0.5, 0.1, 400, 31).first, 0);
}

// At t = 400 the outer inclusion still fails for a sizable fraction of
// environments: the edge fluctuations have negative mean of order t^{1/3},
// so A(t)/t pokes out of (1 + 0.1) A0. By t = 1600 both sides hold.
TEST(Growth, ShapeSandwichAtT1600) {
  const auto [inner, outer] = sandwich_violations(0.5, 0.1, 1600, 31);
  EXPECT_EQ(inner, 0);
  EXPECT_EQ(outer, 0);
}

TEST(MonteCarlo, SingleCellMatchesGeometricLaw) {
  const auto p = ModelParams::make(0.5, 1, 1);
  const auto b = monte_carlo_batch(p, WeightKind::Geometric, 100000, 9, 1.0, 1.0, 2);
  const double d = ks_integer(b.raw, [](std::int64_t t) { return t < 0 ? 0.0 : 1 - std::pow(0.5, t + 1); });
  EXPECT_LE(d, dkw_bound(b.raw.size()));
}

TEST(MonteCarlo, RescaleMetadataRoundTrips) {
  const auto p = ModelParams::make(0.5, 40, 20);
  const auto b = monte_carlo_batch(p, WeightKind::Geometric, 500, 3, 4.0, 1.5);
  for (std::size_t i = 0; i < b.raw.size(); ++i) {
    EXPECT_EQ(b.rescaled[i], b.rescale(b.raw[i]));
    EXPECT_NEAR(b.unscale(b.rescaled[i]), b.raw[i], 1e-12 * std::max(1.0, b.raw[i]));
  }
}

TEST(MonteCarlo, ThreadCountDoesNotChangeSamples) {
  const auto p = ModelParams::make(0.3, 15, 10);
  const auto a = monte_carlo_batch(p, WeightKind::Geometric, 777, 5, 1.0, 1.0, 1);
  const auto b = monte_carlo_batch(p, WeightKind::Geometric, 777, 5, 1.0, 1.0, 4);
  EXPECT_EQ(a.raw, b.raw);
  EXPECT_EQ(a.rescaled, b.rescaled);
}

TEST(MonteCarlo, ZeroSamplesIsEmpty) {
  const auto b = monte_carlo_batch(ModelParams::make(0.5, 3, 3), WeightKind::Geometric, 0, 1, 1.0, 1.0);
  EXPECT_TRUE(b.raw.empty());
}

TEST(MonteCarlo, TwentyRowsAgreeWithExactLaw) {
  const auto p = ModelParams::from_aspect(0.5, 2.0, 20);
  const auto k = edge_constants(2.0, 0.5);
  const auto b = monte_carlo_batch(p, 100000, 11, k, default_threads());
  const MeixnerEnsemble ens(p);
  const auto lo = static_cast<std::int64_t>(*std::ranges::min_element(b.raw)) - 1;
  const auto hi = static_cast<std::int64_t>(*std::ranges::max_element(b.raw));
  const auto table = ens.table(lo, hi);
  const double d = ks_integer(b.raw, [&](std::int64_t t) { return table[static_cast<std::size_t>(t - lo)].p; });
  EXPECT_LE(d, dkw_bound(b.raw.size()));
}
