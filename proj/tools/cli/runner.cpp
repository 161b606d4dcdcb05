#include "runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include <gapcap/simulator.hpp>
#include <gapcap/units.hpp>

namespace gapcap::cli {

using nlohmann::json;

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void apply_overrides(Scenario& s, const RunOverrides& o) {
  if (o.seed) s.simulation.seed = *o.seed;
  if (o.replications) s.simulation.replications = *o.replications;
  if (o.tol) s.tolerance = *o.tol;
  if (o.quick) s.simulation.crossings = std::max<std::size_t>(1000, s.simulation.crossings / 10);
}

namespace {

struct Emitter {
  const Scenario& s;
  std::optional<double> sweep_value;
  std::vector<ResultRow>& rows;

  std::string name(const std::string& quantity) const {
    return s.label.empty() ? quantity : s.label + "/" + quantity;
  }
  std::string rate_name(const std::string& stem) const {
    return name(stem + (s.per_second_output ? "_per_s" : "_veh_h"));
  }
  double rate(double per_s) const { return s.per_second_output ? per_s : per_s_to_veh_h(per_s); }

  ResultRow& add(Behavior b, std::string quantity, double value, std::string flag = {}) {
    ResultRow r;
    r.sweep_value = sweep_value;
    r.behavior = std::string(to_string(b));
    r.quantity = std::move(quantity);
    r.value = value;
    r.flag = std::move(flag);
    rows.push_back(std::move(r));
    return rows.back();
  }
};

SeriesOptions series_options(const Scenario& s) {
  SeriesOptions o;
  if (s.tolerance) o.tol = *s.tolerance;
  return o;
}

// Service of the head driver under Poisson major traffic; diagnostics go to the row.
struct PoissonService {
  ServiceCharacterization service;
  std::string flag;
  double error = ResultRow::kUnset;
  double count = ResultRow::kUnset;
};

PoissonService poisson_service(const Scenario& s, Behavior b) {
  const double q = s.arrival.total_poisson_rate();
  PoissonService out;
  if (s.impatience.kind() == ImpatiencePolicy::Kind::None) {
    out.service = service(b, s.headway, q);
    if (std::isinf(out.service.mean)) out.flag = "infinite_mgf";
    return out;
  }
  const auto r = service_impatient(b, s.headway, s.impatience, q, series_options(s));
  out.service = r.service;
  out.error = r.tail_bound;
  out.count = static_cast<double>(r.terms);
  if (!r.converged) out.flag = "series_not_converged";
  else if (std::isinf(r.service.mean)) out.flag = "infinite_mgf";
  return out;
}

void emit_capacity(Emitter& e, Behavior b) {
  const auto ps = poisson_service(e.s, b);
  const double cap = std::isfinite(ps.service.mean) && ps.service.mean > 0.0 ? 1.0 / ps.service.mean : 0.0;
  auto& row = e.add(b, e.rate_name("capacity"), e.rate(cap), ps.flag);
  row.error = ps.error;
  row.count = ps.count;
}

void emit_queue(Emitter& e, Behavior b) {
  const auto ps = poisson_service(e.s, b);
  const double lambda = e.s.minor_rate.value();
  const double cap = std::isfinite(ps.service.mean) && ps.service.mean > 0.0 ? 1.0 / ps.service.mean : 0.0;
  auto& c = e.add(b, e.rate_name("capacity"), e.rate(cap), ps.flag);
  c.error = ps.error;
  c.count = ps.count;
  const auto m = queue_metrics(ps.service, lambda);
  std::string flag;
  if (m.regime == QueueRegime::Unstable) flag = "unstable";
  else if (m.regime == QueueRegime::InfiniteMean) flag = "infinite_mean";
  e.add(b, e.name("rho"), m.rho, flag);
  e.add(b, e.name("mean_queue_length"), m.mean_queue_length, flag);
  e.add(b, e.name("mean_delay_s"), m.mean_delay, flag);
}

void emit_mmpp(Emitter& e, Behavior b) {
  MmppOptions o;
  o.initial_phases = e.s.initial_phases;
  o.max_phases = e.s.max_phases;
  if (e.s.tolerance) o.tol = *e.s.tolerance;
  const auto r = capacity_mmpp(b, e.s.arrival.mmpp(), e.s.headway, o);
  auto& row = e.add(b, e.rate_name("capacity"), e.rate(r.value), r.converged ? "" : "not_converged");
  row.error = r.gap;
  row.count = static_cast<double>(r.phases);
  row.residual = r.residual;
}

void emit_naive(Emitter& e, Behavior b) {
  const auto mmpp = e.s.arrival.mmpp();
  for (int variant : {1, 2}) {
    const auto r = naive_capacity(b, mmpp, e.s.headway, variant);
    e.add(b, e.rate_name("naive" + std::to_string(variant) + "_capacity"), e.rate(r.value),
          r.degenerate ? "degenerate" : "");
  }
}

SimConfig sim_config(const Scenario& s, Behavior b) {
  SimConfig c;
  c.major = s.arrival.markov ? MajorTraffic::markov(s.arrival.mmpp()) : MajorTraffic::lanes(s.arrival.lanes);
  c.behavior = b;
  c.law = s.headway;
  c.policy = s.impatience;
  c.lambda = s.minor_rate;
  c.crossings = s.simulation.crossings;
  c.replications = s.simulation.replications;
  c.seed = s.simulation.seed;
  return c;
}

void fill_estimate(ResultRow& row, const SimEstimate& est, double factor) {
  row.error = est.std_error * factor;
  row.ci_low = est.ci_low * factor;
  row.ci_high = est.ci_high * factor;
  row.count = static_cast<double>(est.events);
}

void log_replications(std::vector<std::string>& log, const Emitter& e, Behavior b, const std::string& quantity,
                      const SimEstimate& est, double factor) {
  if (!e.s.simulation.replication_log) return;
  for (std::size_t i = 0; i < est.per_replication.size(); ++i) {
    json line = {{"behavior", std::string(to_string(b))},
                 {"quantity", quantity},
                 {"replication", i},
                 {"seed", e.s.simulation.seed},
                 {"value", est.per_replication[i] * factor}};
    if (e.sweep_value) line["sweep_value"] = *e.sweep_value;
    log.push_back(line.dump());
  }
}

void emit_simulation(Emitter& e, Behavior b, std::vector<std::string>& log) {
  const auto cfg = sim_config(e.s, b);
  const double rate_factor = e.s.per_second_output ? 1.0 : kSecondsPerHour;
  if (!cfg.lambda) {
    const auto est = simulate_capacity(cfg);
    const auto name = e.rate_name("sim_capacity");
    fill_estimate(e.add(b, name, est.point * rate_factor), est, rate_factor);
    log_replications(log, e, b, name, est, rate_factor);
    return;
  }
  const auto est = simulate_queue(cfg);
  const std::string flag = est.unstable ? "unstable" : "";
  const auto put = [&](const std::string& name, const SimEstimate& x, double factor) {
    auto& row = e.add(b, name, est.unstable ? kInfinity : x.point * factor, flag);
    fill_estimate(row, x, factor);
    log_replications(log, e, b, name, x, factor);
  };
  put(e.name("sim_mean_queue_length"), est.queue_length, 1.0);
  put(e.name("sim_mean_delay_s"), est.delay, 1.0);
  put(e.rate_name("sim_throughput"), est.throughput, rate_factor);
}

struct Task {
  const Scenario* scenario;
  std::optional<double> sweep_value;
};

struct TaskOutput {
  std::vector<ResultRow> rows;
  std::vector<std::string> log;
};

TaskOutput run_task(const Task& t) {
  TaskOutput out;
  const Scenario point = t.sweep_value ? at_sweep_value(*t.scenario, *t.sweep_value) : *t.scenario;
  Emitter e{point, t.sweep_value, out.rows};
  for (Behavior b : point.behaviors) {
    switch (point.analysis) {
      case Analysis::Capacity: emit_capacity(e, b); break;
      case Analysis::Queue: emit_queue(e, b); break;
      case Analysis::MmppCapacity: emit_mmpp(e, b); break;
      case Analysis::Naive: emit_naive(e, b); break;
      case Analysis::Simulate: emit_simulation(e, b, out.log); break;
    }
  }
  return out;
}

}  // namespace

std::vector<ResultRow> run_scenarios(const std::vector<Scenario>& set, const RunOptions& options) {
  std::vector<Task> tasks;
  bool simulating = false;
  for (const auto& s : set) {
    simulating = simulating || s.analysis == Analysis::Simulate;
    if (!s.sweep) {
      tasks.push_back({&s, std::nullopt});
      continue;
    }
    for (double v : s.sweep->values()) tasks.push_back({&s, v});
  }
  std::vector<TaskOutput> outputs(tasks.size());
  // the simulator already spreads replications over the cores
  const std::size_t threads = simulating ? 1 : options.threads;
  parallel_for(tasks.size(), threads, [&](std::size_t i) { outputs[i] = run_task(tasks[i]); });

  std::vector<ResultRow> rows;
  for (auto& o : outputs) {
    for (auto& r : o.rows) rows.push_back(std::move(r));
    if (options.replication_log) {
      for (const auto& line : o.log) *options.replication_log << line << '\n';
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    const double va = a.sweep_value.value_or(0.0);
    const double vb = b.sweep_value.value_or(0.0);
    if (va != vb) return va < vb;
    return a.behavior < b.behavior;
  });
  return rows;
}

std::vector<ResultRow> run_scenario(const Scenario& s, const RunOptions& options) {
  return run_scenarios({s}, options);
}

std::string format_number(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string csv_header() {
  return "sweep_value,behavior,quantity,value,diag_flag,diag_error,diag_count,diag_residual,diag_ci_low,diag_ci_high";
}

std::string csv_line(const ResultRow& r) {
  std::ostringstream out;
  out << (r.sweep_value ? format_number(*r.sweep_value) : "") << ',' << r.behavior << ',' << r.quantity << ','
      << format_number(r.value) << ',' << r.flag << ',' << format_number(r.error) << ',' << format_number(r.count)
      << ',' << format_number(r.residual) << ',' << format_number(r.ci_low) << ',' << format_number(r.ci_high);
  return out.str();
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << csv_header() << '\n';
  for (const auto& r : rows) out << csv_line(r) << '\n';
}

}  // namespace gapcap::cli
