#include "gapcap/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <exception>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "gapcap/errors.hpp"
#include "gapcap/numerics.hpp"
#include "gapcap/random.hpp"
#include "gapcap/units.hpp"

namespace gapcap {

MajorTraffic MajorTraffic::poisson(double q_per_s) { return lanes({q_per_s}); }

MajorTraffic MajorTraffic::lanes(std::vector<double> rates_per_s) {
  if (rates_per_s.empty()) throw InvalidArgument("need at least one major-road lane");
  for (double q : rates_per_s) {
    if (!(q >= 0.0) || !std::isfinite(q)) throw InvalidArgument("lane rates must be finite and >= 0");
  }
  MajorTraffic t;
  t.lanes_ = std::move(rates_per_s);
  return t;
}

MajorTraffic MajorTraffic::markov(MmppSpec spec) {
  MajorTraffic t;
  t.mmpp_ = std::move(spec);
  return t;
}

double MajorTraffic::average_rate() const {
  if (mmpp_) return gapcap::average_rate(*mmpp_);
  numerics::CompensatedSum acc;
  for (double q : lanes_) acc.add(q);
  return acc.value();
}

namespace {

// The major-road process seen by the head of the minor-road queue. All clocks are
// exponential, so residual times are redrawn whenever the head starts a new look.
class MajorProcess {
 public:
  MajorProcess(const MajorTraffic& traffic, RandomStream rng) : traffic_(traffic), rng_(rng) {
    if (traffic_.is_markov()) {
      const auto pi = stationary(traffic_.mmpp());
      state_ = rng_.categorical(pi);
      jumps_.resize(pi.size());
      for (std::size_t i = 0; i < pi.size(); ++i) {
        const double mu = traffic_.mmpp().leave_rate(i);
        for (std::size_t j = 0; j < pi.size(); ++j) {
          jumps_[i].push_back(j == i || mu == 0.0 ? 0.0 : traffic_.mmpp().generator()(i, j) / mu);
        }
      }
    }
  }

  // Gap of length t opening at `now`: true and now += t when no major car arrives,
  // otherwise false with now at the arrival epoch.
  bool try_gap(double& now, double t) {
    const double deadline = now + t;
    if (!traffic_.is_markov()) {
      double first = kInfinity;
      for (double q : traffic_.lane_rates()) {
        if (q > 0.0) first = std::min(first, rng_.exponential(q));
      }
      if (now + first >= deadline) {
        now = deadline;
        return true;
      }
      now += first;
      return false;
    }
    const auto& m = traffic_.mmpp();
    for (;;) {
      const double q = m.rate(state_);
      const double mu = m.leave_rate(state_);
      const double total = q + mu;
      if (total == 0.0) {
        now = deadline;
        return true;
      }
      const double dt = rng_.exponential(total);
      if (now + dt >= deadline) {
        now = deadline;
        return true;
      }
      now += dt;
      if (rng_.uniform() * total < q) return false;
      state_ = rng_.categorical(jumps_[state_]);
    }
  }

  // Lets the background chain run while nobody is waiting.
  void idle_until(double now, double until) {
    if (!traffic_.is_markov()) return;
    const auto& m = traffic_.mmpp();
    for (;;) {
      const double mu = m.leave_rate(state_);
      if (mu == 0.0) return;
      now += rng_.exponential(mu);
      if (now >= until) return;
      state_ = rng_.categorical(jumps_[state_]);
    }
  }

 private:
  const MajorTraffic& traffic_;
  RandomStream rng_;
  std::size_t state_ = 0;
  std::vector<std::vector<double>> jumps_;
};

class HeadwaySampler {
 public:
  HeadwaySampler(const HeadwayDistribution& law, RandomStream rng) : law_(law), rng_(rng) {
    for (const auto& a : law_.atoms()) weights_.push_back(a.probability);
  }

  double draw() {
    if (law_.is_atomic()) return law_.atoms()[rng_.categorical(weights_)].value;
    return law_.scale() * rng_.gamma(law_.shape(), law_.rate()) + law_.shift();
  }

 private:
  const HeadwayDistribution& law_;
  RandomStream rng_;
  std::vector<double> weights_;
};

class HeadDriver {
 public:
  HeadDriver(const SimConfig& config, std::uint64_t replication)
      : config_(config),
        major_(config.major, RandomStream::for_replication(config.seed, replication, RandomStream::Role::Major)),
        headway_(config.law, RandomStream::for_replication(config.seed, replication, RandomStream::Role::Headway)),
        fixed_(config.law.mean()) {}

  // Serves one driver starting at `now`; returns with now at its departure.
  void serve(double& now) {
    double t1 = 0.0;
    if (config_.behavior == Behavior::B1) t1 = fixed_;
    if (config_.behavior == Behavior::B3) t1 = headway_.draw();
    for (std::size_t j = 1;; ++j) {
      const double first = config_.behavior == Behavior::B2 ? headway_.draw() : t1;
      const double t = config_.policy.apply(j, first);
      if (t <= 0.0) return;
      if (major_.try_gap(now, t)) return;
    }
  }

  MajorProcess& major() { return major_; }

 private:
  const SimConfig& config_;
  MajorProcess major_;
  HeadwaySampler headway_;
  double fixed_;
};

std::size_t warmup_count(const SimConfig& config) {
  if (!(config.warmup_fraction >= 0.0 && config.warmup_fraction < 1.0)) {
    throw InvalidArgument("warm-up fraction must lie in [0, 1)");
  }
  const auto w = static_cast<std::size_t>(std::floor(config.warmup_fraction * static_cast<double>(config.crossings)));
  if (config.crossings < 2 || w + 1 >= config.crossings) {
    throw SimulationError("horizon of " + std::to_string(config.crossings) + " crossings is too short to pass warm-up");
  }
  return std::max<std::size_t>(w, 1);
}

void validate(const SimConfig& config) {
  if (config.replications == 0) throw InvalidArgument("need at least one replication");
  if (config.crossings == 0) throw InvalidArgument("horizon must be positive");
}

template <class Fn>
void run_parallel(std::size_t count, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double capacity_replication(const SimConfig& config, std::size_t replication) {
  const std::size_t warm = warmup_count(config);
  HeadDriver driver(config, replication);
  double now = 0.0;
  double start = 0.0;
  for (std::size_t c = 1; c <= config.crossings; ++c) {
    driver.serve(now);
    if (c == warm) start = now;
  }
  return static_cast<double>(config.crossings - warm) / (now - start);
}

struct QueueReplication {
  double queue_length = 0.0;
  double delay = 0.0;
  double throughput = 0.0;
  std::size_t backlog = 0;
};

QueueReplication queue_replication(const SimConfig& config, std::size_t replication) {
  const double lambda = *config.lambda;
  const std::size_t warm = warmup_count(config);
  HeadDriver driver(config, replication);
  RandomStream minor = RandomStream::for_replication(config.seed, replication, RandomStream::Role::Minor);

  std::deque<double> waiting;  // arrival epochs, head first
  double now = 0.0;
  double next_arrival = minor.exponential(lambda);
  double last_event = 0.0;
  double area = 0.0;
  double window_start = 0.0;
  numerics::CompensatedSum sojourn;
  std::size_t departures = 0;

  auto admit_until = [&](double t) {
    while (next_arrival <= t) {
      area += static_cast<double>(waiting.size()) * (next_arrival - last_event);
      last_event = next_arrival;
      waiting.push_back(next_arrival);
      next_arrival += minor.exponential(lambda);
    }
  };

  while (departures < config.crossings) {
    if (waiting.empty()) {
      driver.major().idle_until(now, next_arrival);
      now = next_arrival;
      admit_until(now);
    }
    driver.serve(now);
    admit_until(now);
    area += static_cast<double>(waiting.size()) * (now - last_event);
    last_event = now;
    const double arrived = waiting.front();
    waiting.pop_front();
    ++departures;
    if (departures == warm) {
      area = 0.0;
      window_start = now;
      sojourn = {};
    } else if (departures > warm) {
      sojourn.add(now - arrived);
    }
  }
  QueueReplication out;
  const double span = now - window_start;
  const auto counted = static_cast<double>(config.crossings - warm);
  out.queue_length = area / span;
  out.delay = sojourn.value() / counted;
  out.throughput = counted / span;
  out.backlog = waiting.size();
  return out;
}

}  // namespace

SimEstimate pooled_estimate(std::vector<double> per_replication, std::size_t events) {
  SimEstimate est;
  est.events = events;
  est.per_replication = per_replication;
  const std::size_t r = per_replication.size();
  if (r == 0) throw InvalidArgument("no replications to pool");
  // sorted sums make the pooled value independent of replication order
  std::sort(per_replication.begin(), per_replication.end());
  numerics::CompensatedSum sum;
  for (double v : per_replication) sum.add(v);
  est.point = sum.value() / static_cast<double>(r);
  if (r == 1 || !std::isfinite(est.point)) {
    est.std_error = kInfinity;
    est.ci_low = -kInfinity;
    est.ci_high = kInfinity;
    return est;
  }
  numerics::CompensatedSum squares;
  for (double v : per_replication) squares.add((v - est.point) * (v - est.point));
  const double variance = squares.value() / static_cast<double>(r - 1);
  est.std_error = std::sqrt(variance / static_cast<double>(r));
  const boost::math::students_t dist(static_cast<double>(r - 1));
  const double t = boost::math::quantile(dist, 0.995);
  est.ci_low = est.point - t * est.std_error;
  est.ci_high = est.point + t * est.std_error;
  return est;
}

SimEstimate simulate_capacity(const SimConfig& config) {
  validate(config);
  if (config.lambda) throw InvalidArgument("capacity simulation needs a saturated minor road");
  std::vector<double> values(config.replications);
  run_parallel(config.replications, config.threads,
               [&](std::size_t i) { values[i] = capacity_replication(config, i); });
  return pooled_estimate(std::move(values), config.crossings * config.replications);
}

QueueEstimate simulate_queue(const SimConfig& config) {
  validate(config);
  if (!config.lambda || !(*config.lambda > 0.0)) throw InvalidArgument("queue simulation needs lambda > 0");
  std::vector<QueueReplication> reps(config.replications);
  run_parallel(config.replications, config.threads,
               [&](std::size_t i) { reps[i] = queue_replication(config, i); });
  std::vector<double> ql;
  std::vector<double> delay;
  std::vector<double> thr;
  QueueEstimate out;
  const std::size_t warm = warmup_count(config);
  for (const auto& r : reps) {
    ql.push_back(r.queue_length);
    delay.push_back(r.delay);
    thr.push_back(r.throughput);
    out.final_backlog = std::max(out.final_backlog, r.backlog);
    // a stable queue ends with O(1) cars; an overloaded one keeps a share of all arrivals
    if (static_cast<double>(r.backlog) > 0.01 * static_cast<double>(config.crossings - warm) + 50.0) {
      out.unstable = true;
    }
  }
  const std::size_t events = config.crossings * config.replications;
  out.queue_length = pooled_estimate(std::move(ql), events);
  out.delay = pooled_estimate(std::move(delay), events);
  out.throughput = pooled_estimate(std::move(thr), events);
  return out;
}

MmppTrace trace_mmpp(const MmppSpec& mmpp, double horizon_s, std::uint64_t seed) {
  if (!(horizon_s > 0.0)) throw InvalidArgument("trace horizon must be positive");
  RandomStream rng = RandomStream::for_replication(seed, 0, RandomStream::Role::Trace);
  const std::size_t d = mmpp.states();
  const auto pi = stationary(mmpp);
  std::size_t state = rng.categorical(pi);
  std::vector<double> occupied(d, 0.0);
  MmppTrace out;
  double now = 0.0;
  while (now < horizon_s) {
    const double q = mmpp.rate(state);
    const double mu = mmpp.leave_rate(state);
    const double total = q + mu;
    const double dt = total > 0.0 ? rng.exponential(total) : kInfinity;
    if (now + dt >= horizon_s) {
      occupied[state] += horizon_s - now;
      break;
    }
    occupied[state] += dt;
    now += dt;
    if (rng.uniform() * total < q) {
      ++out.arrivals;
      continue;
    }
    std::vector<double> jump(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) jump[j] = j == state ? 0.0 : mmpp.generator()(state, j) / mu;
    state = rng.categorical(jump);
  }
  for (double& t : occupied) t /= horizon_s;
  out.time_fraction = std::move(occupied);
  out.arrival_rate = static_cast<double>(out.arrivals) / horizon_s;
  return out;
}

}  // namespace gapcap
