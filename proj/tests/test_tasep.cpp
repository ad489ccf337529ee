#include <gtest/gtest.h>

#include "lpp/ensemble.hpp"
#include "lpp/growth.hpp"
#include "lpp/stats.hpp"

using namespace lpp;

namespace {

YoungDiagramState random_diagram(CounterRng& rng, int steps) {
  YoungDiagramState s;
  for (int k = 0; k < steps; ++k) s = grow_step(s, 0.5, rng);
  return s;
}

}  // namespace

TEST(TasepEncoding, EmptyDiagramIsStepProfile) {
  const auto c = tasep_encode(YoungDiagramState{});
  for (std::int64_t k = -6; k <= 0; ++k) EXPECT_TRUE(c.occupied(k)) << k;
  for (std::int64_t k = 1; k <= 6; ++k) EXPECT_FALSE(c.occupied(k)) << k;
  EXPECT_EQ(c.particle(0), 0);
  EXPECT_EQ(c.particle(3), -3);
}

TEST(TasepEncoding, SingleCellMovesFrontParticle) {
  const auto c = tasep_encode(YoungDiagramState{1, {1}});
  for (std::int64_t k = -6; k <= -1; ++k) EXPECT_TRUE(c.occupied(k)) << k;
  EXPECT_FALSE(c.occupied(0));
  EXPECT_TRUE(c.occupied(1));
  for (std::int64_t k = 2; k <= 6; ++k) EXPECT_FALSE(c.occupied(k)) << k;
}

TEST(TasepEncoding, RoundTripOnRandomDiagrams) {
  CounterRng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = random_diagram(rng, trial % 40);
    EXPECT_EQ(tasep_decode(tasep_encode(s)).rows, s.rows);
    const auto [lo, hi] = tasep_window(s);
    const auto wide = tasep_encode(s, lo - 3, hi + 5);
    EXPECT_EQ(tasep_decode(wide).rows, s.rows);
    for (std::int64_t k = lo - 5; k <= hi + 7; ++k) EXPECT_EQ(wide.occupied(k), tasep_encode(s).occupied(k));
  }
}

TEST(TasepEncoding, RejectsSmallWindowAndBadCounts) {
  const YoungDiagramState s{0, {3, 1}};
  const auto [lo, hi] = tasep_window(s);
  EXPECT_THROW(tasep_encode(s, lo + 1, hi), domain_error);
  EXPECT_THROW(tasep_encode(s, lo, hi - 1), domain_error);
  TasepConfig c{0, -1, 1, {0, 0, 1}};  // two particles needed, one present
  EXPECT_THROW(tasep_decode(c), domain_error);
}

TEST(TasepDynamics, PackedBlockOnlyFrontMoves) {
  CounterRng rng(3);
  int moved = 0;
  for (int k = 0; k < 2000; ++k) {
    const auto c = tasep_step_discrete(tasep_step_initial(), 0.5, rng);
    for (std::int64_t s = -10; s <= -1; ++s) ASSERT_TRUE(c.occupied(s));
    ASSERT_NE(c.occupied(0), c.occupied(1));
    for (std::int64_t s = 2; s <= 10; ++s) ASSERT_FALSE(c.occupied(s));
    moved += c.occupied(1);
  }
  EXPECT_NEAR(moved / 2000.0, 0.5, 3 * binomial_se(0.5, 2000));
}

TEST(TasepDynamics, NearOneQFreezes) {
  CounterRng rng(4);
  auto c = tasep_encode(YoungDiagramState{0, {2, 1}});
  for (int k = 0; k < 200; ++k) {
    const auto next = tasep_step_discrete(c, 1 - 1e-12, rng);
    for (std::int64_t s = -8; s <= 8; ++s) ASSERT_EQ(next.occupied(s), c.occupied(s));
    c = next;
  }
}

TEST(TasepDynamics, ParticlesNeverCollideOrReverse) {
  CounterRng rng(6);
  auto c = tasep_step_initial();
  for (int step = 0; step < 100; ++step) {
    const auto next = tasep_step_discrete(c, 0.4, rng);
    for (std::int64_t n = 0; n < 15; ++n) {
      const auto d = next.particle(n) - c.particle(n);
      ASSERT_TRUE(d == 0 || d == 1);
      if (n > 0) ASSERT_LT(next.particle(n), next.particle(n - 1));
    }
    c = next;
  }
}

TEST(TasepDynamics, FrontParticleMatchesGrowthInLaw) {
  const int n = 10000, steps = 20;
  const double q = 0.5;
  std::vector<double> via_growth(n), via_tasep(n);
  CounterRng g(100), t(200);
  for (int r = 0; r < n; ++r) {
    YoungDiagramState s;
    for (int k = 0; k < steps; ++k) s = grow_step(s, q, g);
    via_growth[r] = double(tasep_encode(s).particle(0));
    auto c = tasep_step_initial();
    for (int k = 0; k < steps; ++k) c = tasep_step_discrete(c, q, t);
    via_tasep[r] = double(c.particle(0));
  }
  EXPECT_LE(ks_two_sample(via_growth, via_tasep), two_sample_bound(n, n));
}

TEST(TasepDynamics, DecodedAreaMatchesGrowthInLaw) {
  const int n = 4000, steps = 12;
  CounterRng g(1), t(2);
  std::vector<double> a(n), b(n);
  for (int r = 0; r < n; ++r) {
    YoungDiagramState s;
    for (int k = 0; k < steps; ++k) s = grow_step(s, 0.3, g);
    a[r] = double(s.cells());
    auto c = tasep_step_initial();
    for (int k = 0; k < steps; ++k) c = tasep_step_discrete(c, 0.3, t);
    b[r] = double(tasep_decode(c).cells());
  }
  EXPECT_LE(ks_two_sample(a, b), two_sample_bound(n, n));
}

TEST(Current, ZeroTimeAndMonotoneInPosition) {
  EXPECT_EQ(current_Y(0.3, 0.0, 1), 0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::int64_t prev = current_Y(0.0, 50.0, seed);
    for (double u : {0.05, 0.1, 0.2, 0.4, 0.8}) {
      const auto y = current_Y(u, 50.0, seed);
      EXPECT_LE(y, prev);
      prev = y;
    }
  }
}

TEST(Current, OriginCurrentMatchesLaguerreLaw) {
  // P[Y(0,t) <= m] = 1 - P[H(m+1,m+1) <= t].
  const double t = 6.0;
  std::vector<double> exact;
  for (int m = 0; m < 12; ++m) exact.push_back(1.0 - exact_cdf_laguerre(m + 1, m + 1, t).p);
  const int n = 20000;
  std::vector<double> y(n);
  for (int r = 0; r < n; ++r) y[r] = double(current_Y(0.0, t, derive_key(55, r)));
  const double d = ks_integer(y, [&](std::int64_t m) {
    return m < 0 ? 0.0 : m >= std::int64_t(exact.size()) ? 1.0 : exact[std::size_t(m)];
  });
  EXPECT_LE(d, dkw_bound(n));
}

TEST(Current, RejectsBadArguments) {
  EXPECT_THROW(current_Y(1.0, 10.0, 1), domain_error);
  EXPECT_THROW(current_Y(-0.1, 10.0, 1), domain_error);
  EXPECT_THROW(current_Y(0.5, -1.0, 1), domain_error);
}
