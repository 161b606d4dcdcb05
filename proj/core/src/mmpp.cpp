#include "gapcap/mmpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "gapcap/errors.hpp"
#include "gapcap/units.hpp"

namespace gapcap {

using numerics::LuFactorization;
using numerics::Matrix;

namespace {

bool reaches_all(const Matrix& m, bool reverse) {
  const std::size_t d = m.rows();
  std::vector<char> seen(d, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < d; ++j) {
      const double rate = reverse ? m(j, i) : m(i, j);
      if (j != i && rate > 0.0 && !seen[j]) {
        seen[j] = 1;
        stack.push_back(j);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

}  // namespace

MmppSpec::MmppSpec(Matrix generator, std::vector<double> rates_per_s)
    : generator_(std::move(generator)), rates_(std::move(rates_per_s)) {
  const std::size_t d = rates_.size();
  if (d == 0) throw InvalidArgument("MMPP needs at least one background state");
  if (generator_.rows() != d || generator_.cols() != d) {
    throw InvalidArgument("MMPP generator must be d x d with d the number of arrival rates");
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (!(rates_[i] >= 0.0) || !std::isfinite(rates_[i])) {
      throw InvalidArgument("MMPP arrival rate " + std::to_string(i) + " must be finite and >= 0");
    }
    double off = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (j == i) continue;
      const double r = generator_(i, j);
      if (!(r >= 0.0) || !std::isfinite(r)) {
        throw InvalidArgument("MMPP transition rates must be finite and >= 0");
      }
      off += r;
    }
    double& diag = generator_(i, i);
    if (diag == 0.0) {
      diag = -off;
    } else if (std::abs(diag + off) > 1e-12 * std::max(1.0, off)) {
      throw InvalidArgument("MMPP generator row " + std::to_string(i) + " does not sum to zero");
    }
  }
  if (d > 1 && !(reaches_all(generator_, false) && reaches_all(generator_, true))) {
    throw ReducibleChainError("MMPP background chain is not irreducible");
  }
}

MmppSpec MmppSpec::poisson(double q_per_s) { return MmppSpec(Matrix(1, 1), {q_per_s}); }

MmppSpec MmppSpec::two_state(double q1, double q2, double mu1, double mu2) {
  return MmppSpec(Matrix::from_rows({{-mu1, mu1}, {mu2, -mu2}}), {q1, q2});
}

MmppSpec MmppSpec::permuted(std::span<const std::size_t> order) const {
  const std::size_t d = states();
  if (order.size() != d) throw InvalidArgument("permutation size must match the state count");
  Matrix g(d, d);
  std::vector<double> q(d);
  for (std::size_t a = 0; a < d; ++a) {
    q[a] = rates_.at(order[a]);
    for (std::size_t b = 0; b < d; ++b) g(a, b) = generator_(order[a], order[b]);
  }
  return MmppSpec(std::move(g), std::move(q));
}

std::vector<double> stationary(const MmppSpec& mmpp) {
  const std::size_t d = mmpp.states();
  if (d == 1) return {1.0};
  // pi M = 0  <=>  M^T pi^T = 0, last equation swapped for the normalization
  Matrix a(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) a(i, j) = mmpp.generator()(j, i);
  }
  for (std::size_t j = 0; j < d; ++j) a(d - 1, j) = 1.0;
  std::vector<double> rhs(d, 0.0);
  rhs[d - 1] = 1.0;
  LuFactorization lu(std::move(a));
  std::vector<double> pi = lu.solve(rhs);
  for (double& p : pi) p = std::max(p, 0.0);
  return pi;
}

double average_rate(const MmppSpec& mmpp) {
  const auto pi = stationary(mmpp);
  numerics::CompensatedSum acc;
  for (std::size_t i = 0; i < pi.size(); ++i) acc.add(pi[i] * mmpp.rate(i));
  return acc.value();
}

PhasePlan PhasePlan::uniform(Behavior behavior, const HeadwayDistribution& law, std::size_t k) {
  if (!law.is_atomic()) {
    throw UnsupportedLawError("Markov platooning needs a deterministic or discrete headway law, got " +
                              law.describe());
  }
  if (k == 0) throw InvalidArgument("phase count must be >= 1");
  PhasePlan plan;
  if (behavior == Behavior::B1) {
    plan.headways = {law.mean()};
    plan.weights = {1.0};
  } else {
    for (const auto& a : law.atoms()) {
      plan.headways.push_back(a.value);
      plan.weights.push_back(a.probability);
    }
  }
  for (double t : plan.headways) {
    plan.phases.push_back(k);
    plan.kappa.push_back(static_cast<double>(k) / t);
  }
  return plan;
}

std::size_t PhasePlan::index(std::size_t n, std::size_t i, std::size_t j, std::size_t d) const {
  std::size_t offset = 0;
  for (std::size_t m = 0; m < n; ++m) offset += d * phases[m];
  return offset + i * phases[n] + j;
}

std::size_t PhasePlan::unknowns(std::size_t d) const {
  std::size_t total = 0;
  for (auto k : phases) total += d * k;
  return total;
}

numerics::DenseSystem assemble_cycle_system(Behavior behavior, const MmppSpec& mmpp,
                                            const PhasePlan& plan) {
  const std::size_t d = mmpp.states();
  const std::size_t size = plan.unknowns(d);
  const std::size_t blocks = plan.blocks();
  numerics::DenseSystem sys{Matrix(size, size), {std::vector<double>(size, 0.0), std::vector<double>(size, 0.0)}};
  auto& a = sys.a;
  auto& b = sys.rhs[0];
  auto& c = sys.rhs[1];

  for (std::size_t n = 0; n < blocks; ++n) {
    const std::size_t k = plan.phases[n];
    const double kappa = plan.kappa[n];
    for (std::size_t i = 0; i < d; ++i) {
      const double q = mmpp.rate(i);
      const double rho = mmpp.leave_rate(i) + q + kappa;
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t row = plan.index(n, i, j, d);
        a(row, row) += 1.0;
        for (std::size_t l = 0; l < d; ++l) {
          if (l != i) a(row, plan.index(n, l, j, d)) -= mmpp.generator()(i, l) / rho;
        }
        // a major-road car arrives: the attempt fails and restarts
        if (behavior == Behavior::B2) {
          for (std::size_t m = 0; m < blocks; ++m) a(row, plan.index(m, i, 0, d)) -= plan.weights[m] * q / rho;
        } else {
          a(row, plan.index(n, i, 0, d)) -= q / rho;
        }
        if (j + 1 < k) {
          a(row, plan.index(n, i, j + 1, d)) -= kappa / rho;
        } else {
          // the car has crossed; outside the reference state the next car draws afresh
          b[row] += kappa / rho;
          if (i != 0) {
            for (std::size_t m = 0; m < blocks; ++m) a(row, plan.index(m, i, 0, d)) -= plan.weights[m] * kappa / rho;
          }
        }
        c[row] = 1.0 / rho;
      }
    }
  }
  return sys;
}

numerics::DenseSystem assemble_b1(const MmppSpec& mmpp, double t_seconds, std::size_t k) {
  return assemble_cycle_system(Behavior::B1, mmpp,
                               PhasePlan::uniform(Behavior::B1, HeadwayDistribution::deterministic(t_seconds), k));
}

namespace {

// Right-hand sides of the row-scaled equations: b (served cars) and c (cycle time).
std::pair<std::vector<double>, std::vector<double>> cycle_rhs(const MmppSpec& mmpp, const PhasePlan& plan) {
  const std::size_t d = mmpp.states();
  std::vector<double> b(plan.unknowns(d), 0.0);
  std::vector<double> c(plan.unknowns(d), 0.0);
  for (std::size_t n = 0; n < plan.blocks(); ++n) {
    for (std::size_t i = 0; i < d; ++i) {
      const double rho = mmpp.leave_rate(i) + mmpp.rate(i) + plan.kappa[n];
      for (std::size_t j = 0; j < plan.phases[n]; ++j) {
        c[plan.index(n, i, j, d)] = 1.0 / rho;
      }
      b[plan.index(n, i, plan.phases[n] - 1, d)] = plan.kappa[n] / rho;
    }
  }
  return {std::move(b), std::move(c)};
}

// rhs - A x for the row-scaled system, accumulated in long double.
std::vector<double> cycle_defect(Behavior behavior, const MmppSpec& mmpp, const PhasePlan& plan,
                                 const std::vector<double>& x, const std::vector<double>& rhs) {
  const std::size_t d = mmpp.states();
  const std::size_t blocks = plan.blocks();
  std::vector<double> out(x.size());
  auto mixed = [&](std::size_t i) {
    long double s = 0.0L;
    for (std::size_t m = 0; m < blocks; ++m) s += static_cast<long double>(plan.weights[m]) * x[plan.index(m, i, 0, d)];
    return s;
  };
  for (std::size_t n = 0; n < blocks; ++n) {
    const std::size_t k = plan.phases[n];
    const long double kappa = plan.kappa[n];
    for (std::size_t i = 0; i < d; ++i) {
      const long double q = mmpp.rate(i);
      const long double rho = static_cast<long double>(mmpp.leave_rate(i)) + q + kappa;
      const long double fail = behavior == Behavior::B2 ? mixed(i) : static_cast<long double>(x[plan.index(n, i, 0, d)]);
      const long double restart = i != 0 ? mixed(i) : 0.0L;
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t row = plan.index(n, i, j, d);
        long double acc = rho * x[row];
        for (std::size_t l = 0; l < d; ++l) {
          if (l != i) acc -= static_cast<long double>(mmpp.generator()(i, l)) * x[plan.index(n, l, j, d)];
        }
        acc -= q * fail;
        acc -= kappa * (j + 1 < k ? static_cast<long double>(x[row + 1]) : restart);
        out[row] = static_cast<double>(static_cast<long double>(rhs[row]) - acc / rho);
      }
    }
  }
  return out;
}

// max row sum of |A| for the row-scaled system
double cycle_row_norm(const MmppSpec& mmpp, const PhasePlan& plan) {
  double worst = 0.0;
  for (std::size_t n = 0; n < plan.blocks(); ++n) {
    for (std::size_t i = 0; i < mmpp.states(); ++i) {
      const double rho = mmpp.leave_rate(i) + mmpp.rate(i) + plan.kappa[n];
      double off = mmpp.rate(i);
      for (std::size_t l = 0; l < mmpp.states(); ++l) {
        if (l != i) off += std::abs(mmpp.generator()(i, l));
      }
      worst = std::max(worst, 1.0 + (off + plan.kappa[n]) / rho);
    }
  }
  return worst;
}

// normwise backward error |r| / (|A| |x| + |b|), infinity norms
double relative_defect(const std::vector<double>& defect, const std::vector<double>& x,
                       const std::vector<double>& rhs, double a_norm) {
  double r = 0.0;
  double xn = 0.0;
  double bn = 0.0;
  for (std::size_t i = 0; i < defect.size(); ++i) {
    r = std::max(r, std::abs(defect[i]));
    xn = std::max(xn, std::abs(x[i]));
    bn = std::max(bn, std::abs(rhs[i]));
  }
  const double den = a_norm * xn + bn;
  return den > 0.0 ? r / den : r;
}

Matrix block_matrix(const MmppSpec& mmpp, double kappa) {
  const std::size_t d = mmpp.states();
  Matrix b(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t l = 0; l < d; ++l) b(i, l) = -mmpp.generator()(i, l);
    b(i, i) += kappa + mmpp.rate(i);
  }
  return b;
}

// Phase-recursive elimination. Within block n the unscaled equations read
//   B_n x_j = rho o r_j + Q F z + kappa (x_{j+1}  or  R z)
// with z the phase-0 unknowns of every block, so each x_j is affine in z.
class StructuredCycleSolver {
 public:
  StructuredCycleSolver(Behavior behavior, const MmppSpec& mmpp, const PhasePlan& plan)
      : behavior_(behavior), mmpp_(mmpp), plan_(plan), d_(mmpp.states()), z_size_(plan.blocks() * d_),
        terminal_(d_, z_size_) {
    for (std::size_t i = 1; i < d_; ++i) {
      for (std::size_t m = 0; m < plan_.blocks(); ++m) terminal_(i, m * d_ + i) = plan_.weights[m];
    }
    Matrix outer = Matrix::identity(z_size_);
    std::vector<double> column(d_);
    for (std::size_t n = 0; n < plan_.blocks(); ++n) {
      const double kappa = plan_.kappa[n];
      factors_.emplace_back(block_matrix(mmpp_, kappa));
      failure_.push_back(failure(n));
      const Matrix& fail = failure_.back();
      Matrix u(d_, z_size_);
      for (std::size_t step = 0; step < plan_.phases[n]; ++step) {
        for (std::size_t col = 0; col < z_size_; ++col) {
          for (std::size_t i = 0; i < d_; ++i) {
            column[i] = fail(i, col) + kappa * (step == 0 ? terminal_(i, col) : u(i, col));
          }
          factors_[n].solve_in_place(column);
          for (std::size_t i = 0; i < d_; ++i) u(i, col) = column[i];
        }
      }
      for (std::size_t i = 0; i < d_; ++i) {
        for (std::size_t col = 0; col < z_size_; ++col) outer(n * d_ + i, col) -= u(i, col);
      }
    }
    outer_.emplace(std::move(outer));
  }

  std::vector<double> solve(const std::vector<double>& rhs) const {
    // constant parts of x_0 per block
    std::vector<double> v0(z_size_, 0.0);
    std::vector<double> x(d_);
    for (std::size_t n = 0; n < plan_.blocks(); ++n) {
      sweep(n, rhs, nullptr, nullptr, x);
      for (std::size_t i = 0; i < d_; ++i) v0[n * d_ + i] = x[i];
    }
    const std::vector<double> z = outer_->solve(v0);
    std::vector<double> out(rhs.size());
    for (std::size_t n = 0; n < plan_.blocks(); ++n) sweep(n, rhs, &z, &out, x);
    return out;
  }

 private:
  Matrix failure(std::size_t n) const {
    Matrix f(d_, z_size_);
    for (std::size_t i = 0; i < d_; ++i) {
      if (behavior_ == Behavior::B2) {
        for (std::size_t m = 0; m < plan_.blocks(); ++m) f(i, m * d_ + i) = plan_.weights[m] * mmpp_.rate(i);
      } else {
        f(i, n * d_ + i) = mmpp_.rate(i);
      }
    }
    return f;
  }

  // Backward sweep over the phases of block n; with z absent only the constant part is kept.
  void sweep(std::size_t n, const std::vector<double>& rhs, const std::vector<double>* z,
             std::vector<double>* out, std::vector<double>& x) const {
    const std::size_t k = plan_.phases[n];
    const double kappa = plan_.kappa[n];
    std::vector<double> fz(d_, 0.0);
    std::vector<double> tz(d_, 0.0);
    if (z) {
      fz = failure_[n].multiply(*z);
      tz = terminal_.multiply(*z);
    }
    for (std::size_t step = 0; step < k; ++step) {
      const std::size_t j = k - 1 - step;
      for (std::size_t i = 0; i < d_; ++i) {
        const double rho = mmpp_.leave_rate(i) + mmpp_.rate(i) + kappa;
        const double own = rho * rhs[plan_.index(n, i, j, d_)];
        x[i] = own + fz[i] + kappa * (step == 0 ? tz[i] : x[i]);
      }
      factors_[n].solve_in_place(x);
      if (out) {
        for (std::size_t i = 0; i < d_; ++i) (*out)[plan_.index(n, i, j, d_)] = x[i];
      }
    }
  }

  Behavior behavior_;
  const MmppSpec& mmpp_;
  const PhasePlan& plan_;
  std::size_t d_;
  std::size_t z_size_;
  Matrix terminal_;
  std::vector<Matrix> failure_;
  std::vector<LuFactorization> factors_;
  std::optional<LuFactorization> outer_;
};

void finish(CycleQuantities& out, Behavior behavior, const MmppSpec& mmpp, const PhasePlan& plan) {
  const std::size_t d = mmpp.states();
  for (std::size_t n = 0; n < plan.blocks(); ++n) {
    out.h10 += plan.weights[n] * out.h[plan.index(n, 0, 0, d)];
    out.tau10 += plan.weights[n] * out.tau[plan.index(n, 0, 0, d)];
  }
  const auto [b, c] = cycle_rhs(mmpp, plan);
  const double a_norm = cycle_row_norm(mmpp, plan);
  out.residual_h = relative_defect(cycle_defect(behavior, mmpp, plan, out.h, b), out.h, b, a_norm);
  out.residual_tau = relative_defect(cycle_defect(behavior, mmpp, plan, out.tau, c), out.tau, c, a_norm);
}

}  // namespace

CycleQuantities solve_cycle(Behavior behavior, const MmppSpec& mmpp, const PhasePlan& plan) {
  const StructuredCycleSolver solver(behavior, mmpp, plan);
  const auto [b, c] = cycle_rhs(mmpp, plan);
  CycleQuantities out;
  out.h = solver.solve(b);
  out.tau = solver.solve(c);
  // one round of refinement against a long-double defect
  for (auto* pair : {&out.h, &out.tau}) {
    const auto& rhs = pair == &out.h ? b : c;
    const auto correction = solver.solve(cycle_defect(behavior, mmpp, plan, *pair, rhs));
    for (std::size_t r = 0; r < pair->size(); ++r) (*pair)[r] += correction[r];
  }
  finish(out, behavior, mmpp, plan);
  return out;
}

CycleQuantities solve_cycle_dense(Behavior behavior, const MmppSpec& mmpp, const PhasePlan& plan) {
  const auto sys = assemble_cycle_system(behavior, mmpp, plan);
  const auto solved = numerics::solve(sys);
  CycleQuantities out;
  out.h = solved.solutions[0];
  out.tau = solved.solutions[1];
  finish(out, behavior, mmpp, plan);
  return out;
}

CapacityResult capacity_mmpp(Behavior behavior, const MmppSpec& mmpp, const HeadwayDistribution& law,
                             const MmppOptions& options) {
  if (!law.is_atomic()) {
    throw UnsupportedLawError("Markov platooning needs a deterministic or discrete headway law, got " +
                              law.describe());
  }
  if (options.initial_phases == 0 || options.max_phases < options.initial_phases) {
    throw InvalidArgument("phase limits must satisfy 1 <= initial <= max");
  }
  if (!(options.tol > 0.0)) throw InvalidArgument("phase tolerance must be positive");

  CapacityResult result;
  std::size_t k = options.initial_phases;
  for (;;) {
    const CycleQuantities cq = solve_cycle(behavior, mmpp, PhasePlan::uniform(behavior, law, k));
    PhaseStep step{k, cq.capacity(), cq.capacity(), 0.0, std::max(cq.residual_h, cq.residual_tau)};
    if (!result.history.empty()) {
      const double prev = result.history.back().raw;
      step.raw_gap = std::abs(step.raw - prev) / std::abs(step.raw);
      step.extrapolated = 2.0 * step.raw - prev;
    }
    result.residual = std::max(result.residual, step.residual);
    result.history.push_back(step);
    result.phases = k;
    result.h10 = cq.h10;
    result.tau10 = cq.tau10;

    const std::size_t levels = result.history.size();
    if (options.extrapolate) {
      result.value = step.extrapolated;
      if (levels >= 3) {
        const double prev = result.history[levels - 2].extrapolated;
        result.gap = std::abs(step.extrapolated - prev) / std::abs(step.extrapolated);
      } else {
        result.gap = kInfinity;
      }
    } else {
      result.value = step.raw;
      result.gap = levels >= 2 ? step.raw_gap : kInfinity;
    }
    if (result.gap < options.tol) {
      result.converged = true;
      break;
    }
    if (k > options.max_phases / 2) {
      result.warning = "phase count reached " + std::to_string(k) + " without meeting the tolerance";
      break;
    }
    k *= 2;
  }
  return result;
}

CapacityResult capacity_mmpp(Behavior behavior, const MmppSpec& mmpp, const HeadwayDistribution& law,
                             const ImpatiencePolicy& policy, const MmppOptions& options) {
  if (policy.kind() != ImpatiencePolicy::Kind::None) {
    throw UnsupportedCombinationError("impatience is not supported together with Markov platooning");
  }
  return capacity_mmpp(behavior, mmpp, law, options);
}

NaiveResult naive_capacity(const MmppSpec& mmpp, std::span<const double> mean_service, int variant) {
  if (mean_service.size() != mmpp.states()) {
    throw InvalidArgument("need one mean service time per background state");
  }
  if (variant != 1 && variant != 2) throw InvalidArgument("naive capacity variant must be 1 or 2");
  const auto pi = stationary(mmpp);
  NaiveResult out;
  numerics::CompensatedSum acc;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    const double s = mean_service[i];
    if (!(s > 0.0)) throw InvalidArgument("mean service times must be positive");
    if (is_infinite(s)) {
      out.degenerate = true;
      if (variant == 2) {
        out.warning = "state " + std::to_string(i) + " has an infinite mean service time";
        out.value = 0.0;
        return out;
      }
      out.warning = "dropped state " + std::to_string(i) + " with an infinite mean service time";
      continue;
    }
    acc.add(variant == 1 ? pi[i] / s : pi[i] * s);
  }
  out.value = variant == 1 ? acc.value() : 1.0 / acc.value();
  return out;
}

NaiveResult naive_capacity(Behavior behavior, const MmppSpec& mmpp, const HeadwayDistribution& law,
                           int variant) {
  std::vector<double> means;
  for (std::size_t i = 0; i < mmpp.states(); ++i) means.push_back(service(behavior, law, mmpp.rate(i)).mean);
  return naive_capacity(mmpp, means, variant);
}

}  // namespace gapcap
