#include <gtest/gtest.h>

#include <cmath>

#include "gapcap/distributions.hpp"
#include "gapcap/errors.hpp"

namespace {

using gapcap::Atom;
using gapcap::HeadwayDistribution;

TEST(Distribution, DiscreteMergesSortsAndDropsZeros) {
  const auto d = HeadwayDistribution::discrete({{14.0, 0.05}, {3.0, 0.0}, {6.0, 0.9}, {14.0, 0.05}});
  ASSERT_EQ(d.atoms().size(), 2u);
  EXPECT_EQ(d.atoms()[0], (Atom{6.0, 0.9}));
  EXPECT_DOUBLE_EQ(d.atoms()[1].probability, 0.1);
  EXPECT_EQ(d.kind(), HeadwayDistribution::Kind::Discrete);
  EXPECT_DOUBLE_EQ(d.support_min(), 6.0);
  EXPECT_DOUBLE_EQ(d.support_max(), 14.0);
}

TEST(Distribution, RejectsBadInput) {
  EXPECT_THROW(HeadwayDistribution::deterministic(0.0), gapcap::InvalidArgument);
  EXPECT_THROW(HeadwayDistribution::deterministic(NAN), gapcap::InvalidArgument);
  EXPECT_THROW(HeadwayDistribution::discrete({{3.0, 0.5}, {4.0, 0.4}}), gapcap::InvalidArgument);
  EXPECT_THROW(HeadwayDistribution::discrete({{-1.0, 1.0}}), gapcap::InvalidArgument);
  EXPECT_THROW(HeadwayDistribution::discrete({}), gapcap::InvalidArgument);
  EXPECT_THROW(HeadwayDistribution::exponential(-1.0), gapcap::InvalidArgument);
  EXPECT_THROW(HeadwayDistribution::gamma(0.0, 1.0), gapcap::InvalidArgument);
}

TEST(Distribution, MomentsAndTransforms) {
  const auto g = HeadwayDistribution::gamma(2.0, 0.5);
  EXPECT_DOUBLE_EQ(g.mean(), 4.0);
  EXPECT_DOUBLE_EQ(g.second_moment(), 24.0);
  EXPECT_NEAR(g.laplace(0.3), std::pow(0.5 / 0.8, 2.0), 1e-15);
  EXPECT_NEAR(g.mgf(0.2), std::pow(0.5 / 0.3, 2.0), 1e-14);
  EXPECT_TRUE(std::isinf(g.mgf(0.5)));
  EXPECT_TRUE(std::isinf(g.mgf_minus_one(0.7)));
  EXPECT_NEAR(g.mgf_minus_one(1e-12), 4e-12, 1e-22);
  EXPECT_NEAR(g.one_minus_laplace(1e-12), 4e-12, 1e-22);

  const auto d = HeadwayDistribution::discrete({{6.0, 0.9}, {14.0, 0.1}});
  EXPECT_NEAR(d.mean(), 6.8, 1e-15);
  EXPECT_NEAR(d.second_moment(), 0.9 * 36 + 0.1 * 196, 1e-12);
  EXPECT_NEAR(d.mgf(0.1), 0.9 * std::exp(0.6) + 0.1 * std::exp(1.4), 1e-14);
  EXPECT_NEAR(d.tilted_mean(0.1), 0.9 * 6 * std::exp(-0.6) + 0.1 * 14 * std::exp(-1.4), 1e-14);
}

TEST(Distribution, ExpMomentAgreesWithQuadrature) {
  const auto g = HeadwayDistribution::gamma(0.5, 1.0 / 14.0);
  for (int order = 0; order <= 2; ++order) {
    for (double t : {-0.3, 0.0, 0.05}) {
      const double exact = g.exp_moment(order, t);
      const double quad = g.expect([&](double x) { return std::pow(x, order) * std::exp(t * x); }, 1e-10);
      EXPECT_NEAR(exact / quad, 1.0, 1e-7) << order << " " << t;
    }
  }
  EXPECT_TRUE(std::isinf(g.exp_moment(1, 0.1)));
}

TEST(Distribution, FailedGapMassMatchesDefinition) {
  // E[tau 1{tau < T}] for tau ~ Exp(q): for fixed T it is (1 - e^{-qT}(1 + qT)) / q
  const double q = 0.2;
  const auto d = HeadwayDistribution::deterministic(5.0);
  EXPECT_NEAR(d.failed_gap_mass(q), (1 - std::exp(-1.0) * 2.0) / q, 1e-14);
  const auto e = HeadwayDistribution::exponential(0.25);
  const double quad = e.expect([q](double t) { return (1 - std::exp(-q * t) * (1 + q * t)) / q; }, 1e-12);
  EXPECT_NEAR(e.failed_gap_mass(q), quad, 1e-9);
}

TEST(Distribution, AffinePush) {
  const auto d = HeadwayDistribution::discrete({{6.0, 0.9}, {14.0, 0.1}}).affine_push(0.5, 2.0);
  EXPECT_EQ(d.atoms()[0], (Atom{5.0, 0.9}));
  EXPECT_EQ(d.atoms()[1], (Atom{9.0, 0.1}));
  const auto g = HeadwayDistribution::gamma(2.0, 0.5).affine_push(0.5, 1.0);
  EXPECT_DOUBLE_EQ(g.mean(), 3.0);
  EXPECT_DOUBLE_EQ(g.support_min(), 1.0);
  EXPECT_NEAR(g.laplace(0.4), std::exp(-0.4) * std::pow(0.5 / 0.7, 2.0), 1e-14);
  EXPECT_THROW(HeadwayDistribution::deterministic(1.0).affine_push(0.0, 1.0), gapcap::InvalidArgument);
  EXPECT_THROW(HeadwayDistribution::deterministic(1.0).affine_push(1.0, -2.0), gapcap::InvalidArgument);
}

TEST(Distribution, PointValues) {
  const auto hl = HeadwayDistribution::discrete({{6.22, 0.9}, {14.0, 0.1}});
  EXPECT_NEAR(hl.mean(), 6.998, 1e-14);
  EXPECT_DOUBLE_EQ(HeadwayDistribution::gamma(0.5, 1.0 / 14.0).mean(), 7.0);
  EXPECT_DOUBLE_EQ(HeadwayDistribution::deterministic(7.0).mean(), 7.0);
  EXPECT_NEAR(hl.laplace(1.0 / 6.0), 0.9 * std::exp(-6.22 / 6) + 0.1 * std::exp(-14.0 / 6), 1e-15);
  EXPECT_NEAR(hl.laplace(1.0 / 6.0), 0.32887, 1e-5);
  EXPECT_NEAR(hl.mgf(1.0 / 6.0), 3.5691, 1e-4);
  EXPECT_TRUE(std::isinf(HeadwayDistribution::exponential(1.0 / 7.0).mgf(1.0 / 6.0)));
  EXPECT_EQ(hl.laplace(0.0), 1.0);
  EXPECT_EQ(hl.mgf(0.0), 1.0);
  const double a = 0.3, q = 0.2;
  EXPECT_NEAR(HeadwayDistribution::exponential(a).tilted_mean(q), a / ((a + q) * (a + q)), 1e-15);
  EXPECT_NEAR(HeadwayDistribution::deterministic(7.0).tilted_mean(q), 7.0 * std::exp(-1.4), 1e-15);
  EXPECT_NEAR(HeadwayDistribution::discrete({{3.0, 0.9}, {60.0, 0.1}}).tilted_mean(0.1),
              0.9 * 3 * std::exp(-0.3) + 0.1 * 60 * std::exp(-6.0), 1e-15);
}

TEST(Distribution, TransformProperties) {
  const HeadwayDistribution laws[] = {
      HeadwayDistribution::discrete({{6.22, 0.9}, {14.0, 0.1}}), HeadwayDistribution::exponential(1.0 / 7.0),
      HeadwayDistribution::gamma(0.5, 1.0 / 14.0), HeadwayDistribution::gamma(4.0, 4.0 / 7.0)};
  for (const auto& d : laws) {
    double prev = 1.0;
    for (double s = 0.01; s < 5.0; s *= 1.7) {
      const double l = d.laplace(s);
      EXPECT_LT(l, prev);
      prev = l;
      EXPECT_GE(l, std::exp(-s * d.mean()) * (1 - 1e-15));
      const double m = d.mgf(s / 100.0);
      if (std::isfinite(m)) {
        EXPECT_GE(m, std::exp(s / 100.0 * d.mean()) * (1 - 1e-15));
      }
      const double h = 1e-5 * s;
      const double fd = -(d.laplace(s + h) - d.laplace(s - h)) / (2 * h);
      EXPECT_NEAR(d.tilted_mean(s) / fd, 1.0, 1e-6);
    }
    const auto same = d.affine_push(1.0, 0.0);
    for (double s : {0.0, 0.1, 1.0}) EXPECT_NEAR(same.laplace(s), d.laplace(s), 1e-14);
  }
}

TEST(Distribution, AffinePushFoldsTheImpatienceStep) {
  // T' = 0.9 (T - 4) + 4 = 0.9 T + 0.4
  const auto d = HeadwayDistribution::deterministic(7.0).affine_push(0.9, 0.4);
  EXPECT_TRUE(d.is_degenerate());
  EXPECT_NEAR(d.atoms()[0].value, 6.7, 1e-15);
  const auto hl = HeadwayDistribution::discrete({{6.22, 0.9}, {14.0, 0.1}}).affine_push(0.9, 0.4);
  EXPECT_NEAR(hl.atoms()[0].value, 5.998, 1e-14);
  EXPECT_NEAR(hl.atoms()[1].value, 13.0, 1e-14);
}

TEST(Distribution, Describe) {
  EXPECT_FALSE(HeadwayDistribution::gamma(2.0, 0.5).describe().empty());
  EXPECT_EQ(gapcap::to_string(HeadwayDistribution::Kind::Exponential), "exponential");
}

}  // namespace
