#include <gtest/gtest.h>

#include <boost/math/special_functions/airy.hpp>
#include <cmath>

#include "lpp/quadrature.hpp"
#include "lpp/tracy_widom.hpp"

using namespace lpp;

TEST(AiryKernel, SymmetricAndConfluent) {
  for (double x : {-3.0, -0.5, 1.2})
    for (double y : {-2.0, 0.3, 4.0}) EXPECT_EQ(airy_kernel(x, y), airy_kernel(y, x));
  const double diag = airy_kernel(-1.0, -1.0);
  EXPECT_NEAR(airy_kernel(-1.0, -1.0 + 1e-3), diag, 1e-3);
  EXPECT_NEAR(airy_kernel(-1.0, -1.0 + 1e-5), diag, 1e-5);
}

TEST(AiryKernel, DiagonalIsIntegralOfSquares) {
  // K(x,x) = int_0^inf Ai(x+s)^2 ds, integrated with the Boost Airy function.
  for (double x : {-4.0, -1.0, 0.0, 1.5}) {
    const double ref = integrate([&](double s) { return std::pow(boost::math::airy_ai(x + s), 2); }, 0.0, 25.0, 50, 20);
    EXPECT_NEAR(airy_kernel(x, x), ref, 1e-10) << x;
  }
}

TEST(AiryKernel, TailTraceMatchesQuadrature) {
  for (double x : {-2.0, 0.0, 2.0, 5.0}) {
    const double ref =
        integrate([&](double y) { return (y - x) * std::pow(boost::math::airy_ai(y), 2); }, x, x + 25.0, 50, 20);
    EXPECT_NEAR(airy_tail_trace(x), ref, 1e-12 + 1e-10 * ref) << x;
  }
}

TEST(TracyWidom, UpperEdge) {
  EXPECT_GE(tw_cdf_fredholm(8.0).f, 1 - 1e-6);
  EXPECT_GE(tw_cdf_painleve(8.0).f, 1 - 1e-6);
  EXPECT_EQ(tw_cdf_fredholm(20.0).f, 1.0);
}

TEST(TracyWidom, RoutesAgree) {
  for (double s = -6.0; s <= 2.0 + 1e-9; s += 0.25) {
    const auto a = tw_cdf_fredholm(s), b = tw_cdf_painleve(s);
    EXPECT_NEAR(a.f, b.f, 1e-6) << s;
    EXPECT_LT(a.est_err, 1e-8);
    EXPECT_LT(b.est_err, 1e-8);
  }
  EXPECT_NEAR(tw_cdf_fredholm(0.0).f, tw_cdf_painleve(0.0).f, 1e-6);
}

TEST(TracyWidom, MonotoneOnGrid) {
  for (auto m : {TwMethod::Fredholm, TwMethod::Painleve}) {
    const auto tab = tw_table(uniform_grid(-6.0, 4.0, 0.5), m);
    EXPECT_EQ(monotonicity_violations(tab), 0);
    for (const auto& v : tab) {
      EXPECT_GE(v.f, 0.0);
      EXPECT_LE(v.f, 1.0);
    }
  }
}

TEST(TracyWidom, MomentsMatchKnownConstants) {
  auto F = [](double s) { return tw_cdf_painleve(s).f; };
  const double neg = integrate(F, -8.0, 0.0, 16, 20);
  const double pos = integrate([&](double s) { return 1 - F(s); }, 0.0, 8.0, 16, 20);
  const double mean = pos - neg;
  const double m2 = integrate([&](double s) { return 2 * s * (1 - F(s)); }, 0.0, 8.0, 16, 20) +
                    integrate([&](double s) { return -2 * s * F(s); }, -8.0, 0.0, 16, 20);
  EXPECT_NEAR(mean, -1.7710868074, 1e-8);
  EXPECT_NEAR(m2 - mean * mean, 0.8131947928, 1e-8);
}

TEST(TracyWidom, MoreNodesStayWithinErrorEstimate) {
  for (double s : {-5.0, -2.0, 0.0, 1.5}) {
    const auto base = tw_cdf_fredholm(s);
    TwFredholmOptions more;
    more.min_nodes = 48;
    const auto fine = tw_cdf_fredholm(s, more);
    EXPECT_LE(std::abs(base.f - fine.f), base.est_err + 1e-14) << s;
  }
}

TEST(TracyWidom, DomainChecks) {
  EXPECT_THROW(tw_cdf_fredholm(-13.0), domain_error);
  EXPECT_THROW(tw_cdf_painleve(-9.0), domain_error);
  EXPECT_THROW(tw_cdf_fredholm(NAN), domain_error);
}

TEST(Painleve, InitialDataAndShape) {
  const auto sol = painleve2_solve(8.0, -8.0);
  EXPECT_NEAR(sol.eval(8.0).first, airy(8.0).ai, 1e-20);
  EXPECT_GT(sol.eval(0.0).first, 0.0);
  double prev = sol.eval(8.0).first;
  for (double x = 7.9; x >= 0.0; x -= 0.1) {
    const double u = sol.eval(x).first;
    EXPECT_GT(u, prev) << x;
    prev = u;
  }
  // Hastings-McLeod: u ~ sqrt(-x/2) as x -> -inf.
  EXPECT_NEAR(sol.eval(-8.0).first / std::sqrt(4.0), 1.0, 0.01);
  for (double x = -8.0; x <= 8.0; x += 0.5) EXPECT_LE(sol.log_f(x), 1e-15);
  EXPECT_EQ(sol.u_violations, 0);
}

TEST(Painleve, TighterToleranceConverges) {
  const double x = -4.0;
  const double ref = painleve2_solve(8.0, -4.0, 1e-16).eval(x).first;
  const double e1 = std::abs(painleve2_solve(8.0, -4.0, 1e-8).eval(x).first - ref);
  const double e2 = std::abs(painleve2_solve(8.0, -4.0, 5e-9).eval(x).first - ref);
  EXPECT_LE(e2, e1 + 1e-15);
  EXPECT_LT(e1, 1e-6);
}

TEST(Painleve, BlowUpIsReported) {
  // Starting above Hastings-McLeod (k > 1) the solution has a pole.
  EXPECT_THROW(painleve2_solve(8.0, -8.0, 1e-16, 28, 1.5), numerical_error);
  EXPECT_THROW(painleve2_solve(5.0, -8.0), domain_error);
}
