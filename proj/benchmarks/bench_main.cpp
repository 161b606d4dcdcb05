#include <benchmark/benchmark.h>

#include "gapcap/impatience.hpp"
#include "gapcap/mmpp.hpp"
#include "gapcap/poisson_core.hpp"
#include "gapcap/simulator.hpp"

namespace {

using gapcap::Behavior;
using gapcap::HeadwayDistribution;

const HeadwayDistribution kLaw = HeadwayDistribution::discrete({{56.0 / 9.0, 0.9}, {14.0, 0.1}});

gapcap::MmppSpec chain() {
  return gapcap::MmppSpec(gapcap::numerics::Matrix::from_rows({{0.0, 0.02}, {0.1, 0.0}}), {600.0 / 3600.0, 2400.0 / 3600.0});
}

void closed_form(benchmark::State& state) {
  const auto b = static_cast<Behavior>(state.range(0));
  double q = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gapcap::service(b, kLaw, q));
    q = q < 1.0 ? q * 1.01 : 0.01;
  }
}
BENCHMARK(closed_form)->DenseRange(0, 2);

void gamma_b3_closed_form(benchmark::State& state) {
  const auto g = HeadwayDistribution::gamma(4.0, 4.0 / 7.0);
  for (auto _ : state) benchmark::DoNotOptimize(gapcap::capacity(Behavior::B3, g, 0.2));
}
BENCHMARK(gamma_b3_closed_form);

void impatient_series(benchmark::State& state) {
  const auto p = gapcap::ImpatiencePolicy::geometric(0.9, 4.0);
  const auto b = static_cast<Behavior>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gapcap::service_impatient(b, kLaw, p, 0.25).service.mean);
}
BENCHMARK(impatient_series)->DenseRange(0, 2);

void cycle_structured(benchmark::State& state) {
  const auto plan = gapcap::PhasePlan::uniform(Behavior::B2, kLaw, static_cast<std::size_t>(state.range(0)));
  const auto m = chain();
  for (auto _ : state) benchmark::DoNotOptimize(gapcap::solve_cycle(Behavior::B2, m, plan).h10);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(cycle_structured)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void cycle_dense(benchmark::State& state) {
  const auto plan = gapcap::PhasePlan::uniform(Behavior::B2, kLaw, static_cast<std::size_t>(state.range(0)));
  const auto m = chain();
  for (auto _ : state) benchmark::DoNotOptimize(gapcap::solve_cycle_dense(Behavior::B2, m, plan).h10);
}
BENCHMARK(cycle_dense)->RangeMultiplier(2)->Range(16, 128);

void mmpp_capacity(benchmark::State& state) {
  const auto m = chain();
  for (auto _ : state) benchmark::DoNotOptimize(gapcap::capacity_mmpp(Behavior::B3, m, kLaw).value);
}
BENCHMARK(mmpp_capacity)->Unit(benchmark::kMillisecond);

void simulate_saturated(benchmark::State& state) {
  gapcap::SimConfig c;
  c.major = gapcap::MajorTraffic::poisson(0.2);
  c.behavior = Behavior::B2;
  c.law = kLaw;
  c.crossings = 100'000;
  c.replications = 1;
  c.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(gapcap::simulate_capacity(c).point);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.crossings));
}
BENCHMARK(simulate_saturated)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
