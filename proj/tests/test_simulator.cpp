#include <gtest/gtest.h>

#include <cmath>

#include "gapcap/errors.hpp"
#include "gapcap/random.hpp"
#include "gapcap/simulator.hpp"

namespace {

using gapcap::Behavior;
using gapcap::HeadwayDistribution;
using gapcap::RandomStream;
using gapcap::SimConfig;

const HeadwayDistribution kHighLow = HeadwayDistribution::discrete({{6.22, 0.9}, {14.0, 0.1}});

SimConfig small_config(Behavior b, double q) {
  SimConfig c;
  c.major = gapcap::MajorTraffic::poisson(q);
  c.behavior = b;
  c.law = kHighLow;
  c.crossings = 100'000;
  c.replications = 6;
  c.seed = 42;
  c.threads = 2;
  return c;
}

TEST(RandomStream, CounterBased) {
  RandomStream a(123), b(123);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_EQ(a.counter(), 100u);
  EXPECT_NE(RandomStream::derive_key(1, 0, RandomStream::Role::Major),
            RandomStream::derive_key(1, 0, RandomStream::Role::Headway));
  EXPECT_NE(RandomStream::derive_key(1, 0, RandomStream::Role::Major),
            RandomStream::derive_key(1, 1, RandomStream::Role::Major));
}

TEST(RandomStream, Moments) {
  RandomStream s(9);
  const int n = 400'000;
  double su = 0, se = 0, sn = 0, sn2 = 0, sg = 0;
  double umin = 1, umax = 0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    su += u;
    se += s.exponential(2.0);
    const double z = s.standard_normal();
    sn += z;
    sn2 += z * z;
    sg += s.gamma(0.5, 0.25);
  }
  EXPECT_GT(umin, 0.0);
  EXPECT_LT(umax, 1.0);
  EXPECT_NEAR(su / n, 0.5, 3e-3);
  EXPECT_NEAR(se / n, 0.5, 5e-3);
  EXPECT_NEAR(sn / n, 0.0, 1e-2);
  EXPECT_NEAR(sn2 / n, 1.0, 1e-2);
  EXPECT_NEAR(sg / n, 2.0, 5e-2);
  const double w[] = {0.2, 0.5, 0.3};
  int hits[3] = {0, 0, 0};
  for (int i = 0; i < 100'000; ++i) ++hits[s.categorical(w)];
  EXPECT_NEAR(hits[1] / 1e5, 0.5, 1e-2);
}

TEST(Simulator, ReproducibleAcrossThreadCounts) {
  auto c = small_config(Behavior::B2, 0.2);
  const auto a = gapcap::simulate_capacity(c);
  c.threads = 1;
  const auto b = gapcap::simulate_capacity(c);
  EXPECT_EQ(a.per_replication, b.per_replication);
  c.seed = 43;
  EXPECT_NE(gapcap::simulate_capacity(c).per_replication, a.per_replication);
}

TEST(Simulator, ReplicationsDoNotDependOnTheirCount) {
  auto c = small_config(Behavior::B3, 0.2);
  c.replications = 3;
  const auto three = gapcap::simulate_capacity(c);
  c.replications = 5;
  const auto five = gapcap::simulate_capacity(c);
  for (std::size_t r = 0; r < 3; ++r) EXPECT_EQ(three.per_replication[r], five.per_replication[r]);
}

TEST(Simulator, CapacityIntervalsContainTheClosedForm) {
  // six 99% intervals: one miss is plausible (p ~ 0.06), two are not
  int misses = 0;
  for (auto b : gapcap::kAllBehaviors) {
    for (double q : {0.05, 0.25}) {
      const auto est = gapcap::simulate_capacity(small_config(b, q));
      const double exact = gapcap::capacity(b, kHighLow, q);
      misses += est.contains(exact) ? 0 : 1;
      EXPECT_LT(std::fabs(est.point - exact), 6.0 * est.std_error)
          << gapcap::to_string(b) << " q=" << q << " [" << est.ci_low << ", " << est.ci_high << "] exact " << exact;
      EXPECT_LT(est.ci_high - est.ci_low, 0.05 * exact);
      EXPECT_EQ(est.per_replication.size(), 6u);
    }
  }
  EXPECT_LE(misses, 1);
}

TEST(Simulator, MultipleLanesPoolToOnePoissonStream) {
  auto c = small_config(Behavior::B1, 0.0);
  c.major = gapcap::MajorTraffic::lanes({0.1, 0.15});
  const auto est = gapcap::simulate_capacity(c);
  EXPECT_TRUE(est.contains(gapcap::capacity(Behavior::B1, kHighLow, 0.25)));
}

TEST(Simulator, ExponentialLawGivesFlatCapacityUnderB2) {
  for (double q : {0.02, 0.2, 1.0}) {
    auto c = small_config(Behavior::B2, q);
    c.law = HeadwayDistribution::exponential(1.0 / 7.0);
    const auto est = gapcap::simulate_capacity(c);
    EXPECT_LT(std::fabs(est.point - 1.0 / 7.0), 6.0 * est.std_error) << q;
  }
}

TEST(Simulator, MarkovTrafficBracketsTheCycleCapacity) {
  const gapcap::MmppSpec m(gapcap::numerics::Matrix::from_rows({{0.0, 0.02}, {0.1, 0.0}}),
                           {600.0 / 3600.0, 2400.0 / 3600.0});
  const auto law = HeadwayDistribution::discrete({{56.0 / 9.0, 0.9}, {14.0, 0.1}});
  auto c = small_config(Behavior::B3, 0.0);
  c.major = gapcap::MajorTraffic::markov(m);
  c.law = law;
  c.crossings = 200'000;
  const auto est = gapcap::simulate_capacity(c);
  const auto exact = gapcap::capacity_mmpp(Behavior::B3, m, law);
  EXPECT_LT(std::fabs(est.point - exact.value), 6.0 * est.std_error);
  // the decomposition formula is far outside
  const auto naive = gapcap::naive_capacity(Behavior::B3, m, law, 2);
  EXPECT_FALSE(est.contains(naive.value));
}

TEST(Simulator, ImpatientDriversMatchTheSeries) {
  const auto p = gapcap::ImpatiencePolicy::geometric(0.9, 4.0);
  const auto seven = HeadwayDistribution::deterministic(7.0);
  auto c = small_config(Behavior::B1, 900.0 / 3600.0);
  c.law = seven;
  c.policy = p;
  const auto est = gapcap::simulate_capacity(c);
  const double exact = gapcap::capacity_impatient(Behavior::B1, seven, p, 900.0 / 3600.0);
  EXPECT_LT(std::fabs(est.point - exact), 6.0 * est.std_error);
  EXPECT_GT(exact, gapcap::capacity(Behavior::B1, seven, 900.0 / 3600.0));
}

TEST(Simulator, LightMinorTrafficHasAnEmptyQueue) {
  auto c = small_config(Behavior::B1, 0.1);
  c.lambda = 1e-5;
  c.crossings = 2'000;
  const auto q = gapcap::simulate_queue(c);
  EXPECT_LT(q.queue_length.point, 1e-3);
}

TEST(Simulator, QueueSatisfiesLittle) {
  auto c = small_config(Behavior::B2, 0.1);
  const double lambda = 0.5 * gapcap::capacity(Behavior::B2, kHighLow, 0.1);
  c.lambda = lambda;
  const auto q = gapcap::simulate_queue(c);
  EXPECT_FALSE(q.unstable);
  EXPECT_NEAR(q.queue_length.point, q.throughput.point * q.delay.point, 0.02 * q.queue_length.point);
  EXPECT_NEAR(q.throughput.point / lambda, 1.0, 0.02);
  const auto m = gapcap::queue_metrics(Behavior::B2, kHighLow, 0.1, lambda);
  EXPECT_NEAR(q.queue_length.point / m.mean_queue_length, 1.0, 0.05);
}

TEST(Simulator, FlagsUnstableQueues) {
  auto c = small_config(Behavior::B1, 0.2);
  c.lambda = 2.0 * gapcap::capacity(Behavior::B1, kHighLow, 0.2);
  const auto q = gapcap::simulate_queue(c);
  EXPECT_TRUE(q.unstable);
  EXPECT_GT(q.final_backlog, 1000u);
}

TEST(Simulator, MmppTraceFractions) {
  const gapcap::MmppSpec m(gapcap::numerics::Matrix::from_rows({{0.0, 0.05, 0.01}, {0.2, 0.0, 0.1}, {0.03, 0.3, 0.0}}),
                           {0.1, 0.5, 0.02});
  const auto tr = gapcap::trace_mmpp(m, 2e6, 5);
  const auto pi = gapcap::stationary(m);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(tr.time_fraction[i], pi[i], 0.01);
  EXPECT_NEAR(tr.arrival_rate / gapcap::average_rate(m), 1.0, 0.01);
}

TEST(Simulator, PooledEstimate) {
  const auto e = gapcap::pooled_estimate({1.0, 2.0, 3.0}, 30);
  EXPECT_DOUBLE_EQ(e.point, 2.0);
  EXPECT_NEAR(e.std_error, 1.0 / std::sqrt(3.0), 1e-15);
  // t_{0.995, 2} = 9.9248
  EXPECT_NEAR(e.ci_high - 2.0, 9.9248432 / std::sqrt(3.0), 1e-6);
  EXPECT_EQ(e.events, 30u);
}

TEST(Simulator, RejectsBadConfig) {
  auto c = small_config(Behavior::B1, 0.1);
  c.replications = 0;
  EXPECT_THROW(gapcap::simulate_capacity(c), gapcap::Error);
  c = small_config(Behavior::B1, 0.1);
  c.crossings = 0;
  EXPECT_THROW(gapcap::simulate_capacity(c), gapcap::Error);
}

}  // namespace
