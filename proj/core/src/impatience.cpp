#include "gapcap/impatience.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gapcap/errors.hpp"
#include "gapcap/numerics.hpp"
#include "gapcap/units.hpp"

namespace gapcap {

ImpatiencePolicy ImpatiencePolicy::none() { return ImpatiencePolicy{}; }

ImpatiencePolicy ImpatiencePolicy::geometric(double alpha, double delta_s) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("impatience alpha must lie in (0, 1]");
  if (!(delta_s >= 0.0) || !std::isfinite(delta_s)) throw InvalidArgument("impatience delta must be >= 0");
  ImpatiencePolicy p;
  p.kind_ = Kind::Geometric;
  p.alpha_ = alpha;
  p.delta_ = delta_s;
  return p;
}

ImpatiencePolicy ImpatiencePolicy::explicit_maps(std::vector<AffineMap> maps) {
  for (const auto& m : maps) {
    if (!(m.scale >= 0.0) || !std::isfinite(m.scale) || !std::isfinite(m.shift)) {
      throw InvalidArgument("explicit impatience maps need a finite scale >= 0 and a finite shift");
    }
  }
  ImpatiencePolicy p;
  p.kind_ = Kind::Explicit;
  p.maps_ = std::move(maps);
  return p;
}

AffineMap ImpatiencePolicy::map(std::size_t j) const {
  if (j == 0) throw InvalidArgument("attempt index starts at 1");
  if (j == 1) return {};
  switch (kind_) {
    case Kind::None: return {};
    case Kind::Geometric: {
      const double a = std::pow(alpha_, static_cast<double>(j - 1));
      return {a, (1.0 - a) * delta_};
    }
    case Kind::Explicit:
      if (maps_.empty()) return {};
      return maps_[std::min(j - 2, maps_.size() - 1)];
  }
  return {};
}

double ImpatiencePolicy::sup_after(std::size_t k, double x) const {
  switch (kind_) {
    case Kind::None: return x;
    case Kind::Geometric: return std::max(map(k + 1)(x), delta_);
    case Kind::Explicit: {
      if (maps_.empty()) return x;
      double best = k == 0 ? x : -kInfinity;
      const std::size_t first = k <= 1 ? 0 : std::min(k - 1, maps_.size() - 1);
      for (std::size_t i = first; i < maps_.size(); ++i) best = std::max(best, maps_[i](x));
      return best;
    }
  }
  return x;
}

std::size_t ImpatiencePolicy::constant_from() const noexcept {
  switch (kind_) {
    case Kind::None: return 1;
    case Kind::Geometric: return alpha_ == 1.0 ? 1 : std::numeric_limits<std::size_t>::max();
    case Kind::Explicit: return maps_.empty() ? 1 : maps_.size() + 1;
  }
  return 1;
}

std::string ImpatiencePolicy::describe() const {
  std::ostringstream os;
  os.precision(12);
  os << to_string(kind_);
  if (kind_ == Kind::Geometric) os << "(alpha=" << alpha_ << ",delta=" << delta_ << ')';
  if (kind_ == Kind::Explicit) {
    os << '[';
    for (std::size_t i = 0; i < maps_.size(); ++i) {
      if (i) os << ',';
      os << '(' << maps_[i].scale << ',' << maps_[i].shift << ')';
    }
    os << ']';
  }
  return os.str();
}

std::string to_string(ImpatiencePolicy::Kind kind) {
  switch (kind) {
    case ImpatiencePolicy::Kind::None: return "none";
    case ImpatiencePolicy::Kind::Geometric: return "geometric";
    case ImpatiencePolicy::Kind::Explicit: return "explicit";
  }
  return "unknown";
}

HeadwayDistribution attempt_law(const ImpatiencePolicy& policy, const HeadwayDistribution& base,
                                std::size_t j) {
  const AffineMap m = policy.map(j);
  if (m.scale == 0.0) return HeadwayDistribution::deterministic(m.shift);
  if (m.scale == 1.0 && m.shift == 0.0) return base;
  return base.affine_push(m.scale, m.shift);
}

namespace {

// P(Poisson(x) >= m)
double poisson_tail(double x, int m) {
  if (x <= 0.0) return 0.0;
  if (x < 1.0) {
    double term = 1.0;
    for (int n = 1; n <= m; ++n) term *= x / n;
    double acc = term;
    for (int n = m + 1; n < 60; ++n) {
      term *= x / n;
      acc += term;
      if (term < 1e-18 * acc) break;
    }
    return std::exp(-x) * acc;
  }
  double term = 1.0;
  double head = 1.0;
  for (int n = 1; n < m; ++n) {
    term *= x / n;
    head += term;
  }
  return std::max(0.0, 1.0 - std::exp(-x) * head);
}

// Per-attempt ingredients; tau ~ Exp(q) is the gap seen at that attempt.
struct AttemptMoments {
  double success = 1.0;     // P(tau > T)
  double failure = 0.0;     // P(tau < T), computed without cancellation
  double fail_mass = 0.0;   // E[tau 1{tau < T}]
  double fail_mass2 = 0.0;  // E[tau^2 1{tau < T}]
  double m1 = 0.0;          // E[T 1{tau > T}]
  double m2 = 0.0;          // E[T^2 1{tau > T}]
};

AttemptMoments scalar_attempt(double t, double q) {
  AttemptMoments a;
  if (t <= 0.0) return a;
  const double x = q * t;
  a.success = std::exp(-x);
  a.failure = -std::expm1(-x);
  a.fail_mass = poisson_tail(x, 2) / q;
  a.fail_mass2 = 2.0 * poisson_tail(x, 3) / (q * q);
  a.m1 = t * a.success;
  a.m2 = t * t * a.success;
  return a;
}

AttemptMoments law_attempt(const HeadwayDistribution& law, double q) {
  AttemptMoments a;
  a.success = law.laplace(q);
  a.failure = law.one_minus_laplace(q);
  a.fail_mass = law.failed_gap_mass(q);
  a.m1 = law.tilted_mean(q);
  a.m2 = law.exp_moment(2, -q);
  if (law.is_atomic()) {
    numerics::CompensatedSum acc;
    for (const auto& atom : law.atoms()) acc.add(atom.probability * poisson_tail(q * atom.value, 3));
    a.fail_mass2 = 2.0 * acc.value() / (q * q);
  } else {
    a.fail_mass2 = std::max(0.0, 2.0 * (a.failure - q * a.m1 - 0.5 * q * q * a.m2) / (q * q));
  }
  return a;
}

struct SeriesSum {
  double mean = 0.0;
  double second = 0.0;
  std::size_t terms = 0;
  double tail_bound = 0.0;
  bool converged = true;
};

// E[Y] and E[Y^2] summed over the number k of rejected gaps.
// Term k: S_k [phi_{k+1} (V_k + G_k^2) + 2 G_k m1_{k+1} + m2_{k+1}] for the second moment.
template <class Attempt, class Sup, class Tail>
SeriesSum sum_series(Attempt&& attempt, Sup&& sup_after, std::size_t constant_from, Tail&& tail,
                     double q, const SeriesOptions& options) {
  numerics::CompensatedSum mean;
  numerics::CompensatedSum second;
  double survive = 1.0;  // S_k
  double g = 0.0;        // G_k
  double v = 0.0;        // V_k
  double bound = kInfinity;
  for (std::size_t k = 0;; ++k) {
    if (options.analytic_constant_tail && k + 1 >= constant_from) {
      const auto [ym, y2] = tail(k + 1);
      mean.add(survive * (g + ym));
      second.add(survive * (v + g * g + 2.0 * g * ym + y2));
      SeriesSum out{mean.value(), second.value(), k, 0.0, true};
      if (!std::isfinite(out.mean)) out.mean = kInfinity;
      if (!std::isfinite(out.second)) out.second = kInfinity;
      return out;
    }
    if (k >= options.max_terms) return {kInfinity, kInfinity, k, bound, false};
    const AttemptMoments a = attempt(k + 1);
    mean.add(survive * (a.success * g + a.m1));
    second.add(survive * (a.success * (v + g * g) + 2.0 * g * a.m1 + a.m2));
    if (a.failure <= 0.0) return {mean.value(), second.value(), k + 1, 0.0, true};
    const double gi = a.fail_mass / a.failure;
    const double g2i = a.fail_mass2 / a.failure;
    v += g2i - gi * gi;
    g += gi;
    survive *= a.failure;
    if (survive == 0.0) return {mean.value(), second.value(), k + 1, 0.0, true};

    const double t_star = sup_after(k + 1);
    const double ym = detail::fixed_headway_mean(t_star, q);
    const double y2 = detail::fixed_headway_second_moment(t_star, q);
    bound = survive * (g + ym);
    const double bound2 = survive * (v + g * g + 2.0 * g * ym + y2);
    if (bound <= options.tol * mean.value() &&
        (!std::isfinite(bound2) || bound2 <= options.tol * second.value())) {
      return {mean.value(), second.value(), k + 1, bound, true};
    }
  }
}

// E[e^{-sY}] = sum_k w_k L_{k+1}(s+q), w_{k+1} = w_k q/(s+q) (1 - L_{k+1}(s+q)).
template <class Lap, class TailLst>
double lst_series(Lap&& one_minus_and_lap, std::size_t constant_from, TailLst&& tail_lst, double q,
                  double s, const SeriesOptions& options) {
  if (s == 0.0) return 1.0;
  const double u = s + q;
  const double r = q / u;
  double w = 1.0;
  numerics::CompensatedSum acc;
  for (std::size_t k = 0;; ++k) {
    if (options.analytic_constant_tail && k + 1 >= constant_from) {
      acc.add(w * tail_lst(k + 1, s));
      return acc.value();
    }
    if (k >= options.max_terms) return acc.value();
    const auto [one_minus, lap] = one_minus_and_lap(k + 1, u);
    acc.add(w * lap);
    w *= r * one_minus;
    if (w < 1e-17) return acc.value();
  }
}

SeriesSum scalar_path(double t1, const ImpatiencePolicy& policy, double q, const SeriesOptions& options) {
  return sum_series(
      [&](std::size_t j) { return scalar_attempt(policy.apply(j, t1), q); },
      [&](std::size_t k) { return policy.sup_after(k, t1); }, policy.constant_from(),
      [&](std::size_t j) {
        const double t = policy.apply(j, t1);
        return std::pair{detail::fixed_headway_mean(t, q), detail::fixed_headway_second_moment(t, q)};
      },
      q, options);
}

double scalar_path_lst(double t1, const ImpatiencePolicy& policy, double q, double s,
                       const SeriesOptions& options) {
  return lst_series(
      [&](std::size_t j, double u) {
        const double t = policy.apply(j, t1);
        return std::pair{-std::expm1(-u * t), std::exp(-u * t)};
      },
      policy.constant_from(),
      [&](std::size_t j, double s_) { return detail::fixed_headway_lst(policy.apply(j, t1), q, s_); },
      q, s, options);
}

// A map collapsing everything onto 0 means the driver always crosses at once.
bool collapses_to_zero(const ImpatiencePolicy& policy, std::size_t j) {
  const AffineMap m = policy.map(j);
  return m.scale == 0.0 && m.shift == 0.0;
}

SeriesSum resampled_path(const HeadwayDistribution& base, const ImpatiencePolicy& policy, double q,
                         const SeriesOptions& options) {
  const double x = base.mean();
  return sum_series(
      [&](std::size_t j) {
        if (collapses_to_zero(policy, j)) return AttemptMoments{};
        return law_attempt(attempt_law(policy, base, j), q);
      },
      [&](std::size_t k) { return policy.sup_after(k, x); }, policy.constant_from(),
      [&](std::size_t j) {
        if (collapses_to_zero(policy, j)) return std::pair{0.0, 0.0};
        const auto svc = service(Behavior::B2, attempt_law(policy, base, j), q);
        return std::pair{svc.mean, svc.second_moment};
      },
      q, options);
}

double resampled_path_lst(const HeadwayDistribution& base, const ImpatiencePolicy& policy, double q,
                          double s, const SeriesOptions& options) {
  return lst_series(
      [&](std::size_t j, double u) {
        if (collapses_to_zero(policy, j)) return std::pair{0.0, 1.0};
        const auto law = attempt_law(policy, base, j);
        return std::pair{law.one_minus_laplace(u), law.laplace(u)};
      },
      policy.constant_from(),
      [&](std::size_t j, double s_) {
        if (collapses_to_zero(policy, j)) return 1.0;
        const auto law = attempt_law(policy, base, j);
        const double u = s_ + q;
        const double lu = law.laplace(u);
        return u * lu / (s_ + q * lu);
      },
      q, s, options);
}

ImpatientService from_sum(const SeriesSum& sum) {
  ImpatientService out;
  out.service.mean = sum.mean;
  out.service.second_moment = sum.second;
  out.terms = sum.terms;
  out.tail_bound = sum.tail_bound;
  out.converged = sum.converged;
  return out;
}

}  // namespace

ImpatientService service_impatient(Behavior behavior, const HeadwayDistribution& base,
                                   const ImpatiencePolicy& policy, double q,
                                   const SeriesOptions& options) {
  if (!(q >= 0.0) || !std::isfinite(q)) throw InvalidArgument("major-road rate must be finite and >= 0");
  if (!(options.tol > 0.0)) throw InvalidArgument("series tolerance must be positive");

  if (q == 0.0) {
    ImpatientService out;
    if (behavior == Behavior::B1) {
      const double t = base.mean();
      out.service = {t, t * t, [t](double s) { return std::exp(-s * t); }};
    } else {
      out.service = {base.mean(), base.second_moment(), [base](double s) { return base.laplace(s); }};
    }
    return out;
  }

  if (options.analytic_constant_tail && policy.constant_from() == 1) {
    ImpatientService out;
    out.service = service(behavior, base, q);
    return out;
  }

  switch (behavior) {
    case Behavior::B1: {
      const double t1 = base.mean();
      ImpatientService out = from_sum(scalar_path(t1, policy, q, options));
      out.service.lst = [t1, policy, q, options](double s) {
        return scalar_path_lst(t1, policy, q, s, options);
      };
      return out;
    }
    case Behavior::B2: {
      ImpatientService out = from_sum(resampled_path(base, policy, q, options));
      out.service.lst = [base, policy, q, options](double s) {
        return resampled_path_lst(base, policy, q, s, options);
      };
      return out;
    }
    case Behavior::B3: break;
  }

  ImpatientService out;
  out.service.lst = [base, policy, q, options](double s) {
    if (s == 0.0) return 1.0;
    return base.expect([&](double t1) { return scalar_path_lst(t1, policy, q, s, options); },
                       options.quad_tol);
  };
  if (base.is_atomic()) {
    numerics::CompensatedSum mean;
    numerics::CompensatedSum second;
    for (const auto& atom : base.atoms()) {
      const SeriesSum sum = scalar_path(atom.value, policy, q, options);
      out.terms = std::max(out.terms, sum.terms);
      out.converged = out.converged && sum.converged;
      out.tail_bound += atom.probability * sum.tail_bound;
      mean.add(atom.probability * sum.mean);
      second.add(atom.probability * sum.second);
    }
    out.service.mean = out.converged ? mean.value() : kInfinity;
    out.service.second_moment = out.converged ? second.value() : kInfinity;
    return out;
  }

  // continuous T_1: outer expectation by quadrature, once per moment
  auto outer = [&](bool want_second) {
    return base.expect(
        [&](double t1) {
          const SeriesSum sum = scalar_path(t1, policy, q, options);
          out.terms = std::max(out.terms, sum.terms);
          if (!sum.converged) {
            out.converged = false;
            return kInfinity;
          }
          out.tail_bound = std::max(out.tail_bound, sum.tail_bound);
          return want_second ? sum.second : sum.mean;
        },
        options.quad_tol);
  };
  out.service.mean = outer(false);
  out.service.second_moment = is_infinite(out.service.mean) ? kInfinity : outer(true);
  if (!std::isfinite(out.service.mean)) out.service.mean = kInfinity;
  if (!std::isfinite(out.service.second_moment)) out.service.second_moment = kInfinity;
  return out;
}

double capacity_impatient(Behavior behavior, const HeadwayDistribution& base,
                          const ImpatiencePolicy& policy, double q, const SeriesOptions& options) {
  const ImpatientService svc = service_impatient(behavior, base, policy, q, options);
  if (!svc.converged || !std::isfinite(svc.service.mean)) return 0.0;
  return 1.0 / svc.service.mean;
}

}  // namespace gapcap
