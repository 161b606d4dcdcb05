#include <gtest/gtest.h>

#include <cmath>

#include "derived_values.hpp"
#include "gapcap/errors.hpp"
#include "gapcap/numerics.hpp"
#include "gapcap/poisson_core.hpp"
#include "gapcap/units.hpp"
#include "oracles.hpp"

namespace {

using gapcap::Behavior;
using gapcap::HeadwayDistribution;
namespace derived = gapcap::testing::derived;

const HeadwayDistribution kHighLow = HeadwayDistribution::discrete({{6.22, 0.9}, {14.0, 0.1}});

void expect_rel(double actual, double expected, double tol) {
  EXPECT_NEAR(actual / expected, 1.0, tol) << actual << " vs " << expected;
}

TEST(PoissonService, FrozenMoments) {
  const double q = 1.0 / 6.0;
  const auto b1 = gapcap::service(Behavior::B1, HeadwayDistribution::deterministic(7.0), q);
  expect_rel(b1.mean, derived::kB1T7Q6Mean, 1e-13);
  expect_rel(b1.second_moment, derived::kB1T7Q6Second, 1e-12);
  const auto b2 = gapcap::service(Behavior::B2, kHighLow, q);
  expect_rel(b2.mean, derived::kB2HlQ6Mean, 1e-13);
  expect_rel(b2.second_moment, derived::kB2HlQ6Second, 1e-12);
  const auto b3 = gapcap::service(Behavior::B3, kHighLow, q);
  expect_rel(b3.mean, derived::kB3HlQ6Mean, 1e-13);
  expect_rel(b3.second_moment, derived::kB3HlQ6Second, 1e-12);
}

TEST(PoissonService, FrozenGammaMoments) {
  const auto b2 = gapcap::service(Behavior::B2, HeadwayDistribution::gamma(0.5, 1.0 / 14.0), 0.1);
  expect_rel(b2.mean, derived::kB2Gamma05Q01Mean, 1e-12);
  expect_rel(b2.second_moment, derived::kB2Gamma05Q01Second, 1e-10);
  const auto b3 = gapcap::service(Behavior::B3, HeadwayDistribution::gamma(2.0, 0.5), 0.2);
  expect_rel(b3.mean, derived::kB3Gamma2Q02Mean, 1e-12);
  expect_rel(b3.second_moment, derived::kB3Gamma2Q02Second, 1e-9);
}

TEST(PoissonService, FixedHeadwayAgainstRenewalOracle) {
  for (double t : {0.5, 3.0, 7.0, 20.0}) {
    for (double q : {0.01, 0.1, 0.5, 2.0}) {
      const auto [m1, m2] = gapcap::testing::renewal_fixed(t, q);
      const auto s = gapcap::service(Behavior::B1, HeadwayDistribution::deterministic(t), q);
      expect_rel(s.mean, static_cast<double>(m1), 1e-12);
      expect_rel(s.second_moment, static_cast<double>(m2), 1e-10);
    }
  }
}

TEST(PoissonService, SmallTrafficSeries) {
  // E[Y] = T + qT^2/2 + q^2T^3/6, E[Y^2] = T^2 + 4qT^3/3 + O(q^2)
  const double t = 7.0, q = 1e-7;
  const auto s = gapcap::service(Behavior::B1, HeadwayDistribution::deterministic(t), q);
  expect_rel(s.mean, t + q * t * t / 2 + q * q * t * t * t / 6, 1e-15);
  expect_rel(s.second_moment, t * t + 4 * q * t * t * t / 3, 1e-12);
}

TEST(PoissonService, QuotedCapacities) {
  const double q = 1.0 / 6.0;
  EXPECT_NEAR(gapcap::per_s_to_veh_h(gapcap::capacity(Behavior::B1, HeadwayDistribution::deterministic(7.0), q)),
              3600.0 / derived::kB1T7Q6Mean, 1e-9);
  EXPECT_NEAR(gapcap::per_s_to_veh_h(gapcap::capacity(Behavior::B2, kHighLow, q)), 294.0, 0.05);
  EXPECT_NEAR(gapcap::per_s_to_veh_h(gapcap::capacity(Behavior::B3, kHighLow, q)), 233.5, 0.1);
  const auto e = HeadwayDistribution::exponential(1.0 / 7.0);
  for (double qq : {0.001, 0.1, 1.0, 10.0}) EXPECT_NEAR(gapcap::service(Behavior::B2, e, qq).mean, 7.0, 1e-12);
  EXPECT_TRUE(gapcap::find_stationary_points([&](double x) { return gapcap::capacity(Behavior::B2, e, x); },
                                             10.0 / 3600.0, 10000.0 / 3600.0)
                  .empty());
  EXPECT_EQ(gapcap::queue_metrics(Behavior::B2, kHighLow, q, 0.0).mean_queue_length, 0.0);
  const auto m = gapcap::queue_metrics(Behavior::B3, e, 0.6 / 7.0, 1e-4);
  EXPECT_EQ(m.regime, gapcap::QueueRegime::InfiniteMean);
  EXPECT_GT(gapcap::capacity(Behavior::B3, e, 0.6 / 7.0), 0.0);
}

TEST(PoissonService, ZeroTrafficLimit) {
  for (auto b : gapcap::kAllBehaviors) {
    const auto s = gapcap::service(b, kHighLow, 0.0);
    expect_rel(s.mean, kHighLow.mean(), 1e-14);
    EXPECT_NEAR(gapcap::capacity(b, kHighLow, 1e-12), 1.0 / kHighLow.mean(), 1e-12);
  }
}

TEST(PoissonService, BehavioursCoincideForAFixedHeadway) {
  const auto d = HeadwayDistribution::deterministic(5.5);
  for (double q : {0.01, 0.2, 1.0}) {
    const double c1 = gapcap::capacity(Behavior::B1, d, q);
    EXPECT_NEAR(gapcap::capacity(Behavior::B2, d, q), c1, 1e-14);
    EXPECT_NEAR(gapcap::capacity(Behavior::B3, d, q), c1, 1e-14);
  }
}

TEST(PoissonService, B1UsesTheMeanHeadway) {
  const double q = 0.3;
  EXPECT_DOUBLE_EQ(gapcap::capacity(Behavior::B1, kHighLow, q),
                   gapcap::capacity(Behavior::B1, HeadwayDistribution::deterministic(kHighLow.mean()), q));
}

TEST(PoissonService, LstMatchesMoments) {
  const double q = 0.2;
  for (auto b : gapcap::kAllBehaviors) {
    const auto s = gapcap::service(b, kHighLow, q);
    EXPECT_NEAR(s.lst(0.0), 1.0, 1e-14);
    const auto m1 = gapcap::numerics::lst_moment(s.lst, 1, s.mean);
    const auto m2 = gapcap::numerics::lst_moment(s.lst, 2, s.mean);
    expect_rel(m1.value, s.mean, 1e-6);
    expect_rel(m2.value, s.second_moment, 1e-5);
  }
}

TEST(PoissonService, DivergentMgfGivesZeroCapacity) {
  const auto e = HeadwayDistribution::exponential(0.25);
  EXPECT_TRUE(std::isinf(gapcap::service(Behavior::B3, e, 0.3).mean));
  EXPECT_EQ(gapcap::capacity(Behavior::B3, e, 0.3), 0.0);
  // B2 stays finite whatever the tail
  EXPECT_GT(gapcap::capacity(Behavior::B2, e, 0.3), 0.0);
  EXPECT_THROW(gapcap::service(Behavior::B1, e, -1.0), gapcap::InvalidArgument);
}

TEST(QueueMetrics, PollaczekKhinchineAndLittle) {
  const auto d = HeadwayDistribution::deterministic(7.0);
  const double q = 0.1, lambda = 0.05;
  const auto s = gapcap::service(Behavior::B1, d, q);
  const auto m = gapcap::queue_metrics(Behavior::B1, d, q, lambda);
  const double rho = lambda * s.mean;
  EXPECT_EQ(m.regime, gapcap::QueueRegime::Stable);
  EXPECT_NEAR(m.rho, rho, 1e-15);
  expect_rel(m.mean_queue_length, rho + lambda * lambda * s.second_moment / (2 * (1 - rho)), 1e-14);
  expect_rel(m.mean_queue_length, lambda * m.mean_delay, 1e-14);
}

TEST(QueueMetrics, Regimes) {
  const auto d = HeadwayDistribution::deterministic(7.0);
  EXPECT_EQ(gapcap::queue_metrics(Behavior::B1, d, 0.1, 1.0).regime, gapcap::QueueRegime::Unstable);
  EXPECT_TRUE(std::isinf(gapcap::queue_metrics(Behavior::B1, d, 0.1, 1.0).mean_queue_length));
  // mean finite, second moment infinite: 2q above the gamma rate
  const auto g = HeadwayDistribution::gamma(2.0, 0.5);
  const auto m = gapcap::queue_metrics(Behavior::B3, g, 0.3, 0.01);
  EXPECT_EQ(m.regime, gapcap::QueueRegime::InfiniteMean);
  EXPECT_LT(m.rho, 1.0);
  EXPECT_TRUE(std::isinf(m.mean_queue_length));
  EXPECT_EQ(gapcap::to_string(gapcap::QueueRegime::InfiniteMean), "infinite_mean");
}

TEST(StationaryPoints, LocatesInteriorExtrema) {
  const auto pts = gapcap::find_stationary_points([](double q) { return q * std::exp(-q); }, 0.01, 100.0);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_NEAR(pts[0].q, 1.0, 1e-3);
  EXPECT_EQ(pts[0].kind, gapcap::StationaryKind::Maximum);
  EXPECT_TRUE(gapcap::find_stationary_points([](double q) { return q; }, 1.0, 2.0).empty());
}

TEST(Behaviour, ParseRoundTrip) {
  for (auto b : gapcap::kAllBehaviors) EXPECT_EQ(gapcap::parse_behavior(gapcap::to_string(b)), b);
  EXPECT_FALSE(gapcap::parse_behavior("B4").has_value());
}

}  // namespace
