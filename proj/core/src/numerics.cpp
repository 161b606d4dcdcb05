#include "gapcap/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <utility>

#include "gapcap/errors.hpp"

namespace gapcap::numerics {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw InvalidArgument("ragged matrix literal");
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

std::vector<double> Matrix::multiply(std::span<const double> x) const {
  if (x.size() != cols_) throw InvalidArgument("matrix/vector size mismatch");
  std::vector<double> y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    CompensatedSum acc;
    const auto r = row(i);
    for (std::size_t j = 0; j < cols_; ++j) acc.add(r[j] * x[j]);
    y[i] = acc.value();
  }
  return y;
}

// ---------------------------------------------------------------------------
// LU

LuFactorization::LuFactorization(Matrix a) : lu_(std::move(a)) {
  const std::size_t n = lu_.rows();
  if (n == 0 || lu_.cols() != n) throw InvalidArgument("LU needs a non-empty square matrix");

  std::vector<double> scale(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : lu_.row(i)) {
      if (!std::isfinite(v)) throw InvalidArgument("matrix has non-finite entries");
      scale[i] = std::max(scale[i], std::abs(v));
    }
  }
  perm_.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t best = k;
    double best_ratio = -1.0;
    for (std::size_t r = k; r < n; ++r) {
      const double s = scale[perm_[r]];
      const double ratio = s > 0.0 ? std::abs(lu_(r, k)) / s : 0.0;
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best = r;
      }
    }
    if (best != k) {
      std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(best).begin());
      std::swap(perm_[k], perm_[best]);
    }
    const double pivot = lu_(k, k);
    const double row_scale = scale[perm_[k]];
    if (row_scale == 0.0 || std::abs(pivot) < 1e-13 * row_scale) {
      throw SingularMatrixError(k, pivot, row_scale);
    }
    const auto pivot_row = lu_.row(k);
    for (std::size_t r = k + 1; r < n; ++r) {
      auto target = lu_.row(r);
      const double factor = target[k] / pivot;
      target[k] = factor;
      if (factor == 0.0) continue;
      for (std::size_t c = k + 1; c < n; ++c) target[c] -= factor * pivot_row[c];
    }
  }
}

void LuFactorization::solve_in_place(std::span<double> b) const {
  const std::size_t n = size();
  if (b.size() != n) throw InvalidArgument("right-hand side has wrong length");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = lu_.row(i);
    double acc = y[i];
    for (std::size_t j = 0; j < i; ++j) acc -= r[j] * y[j];
    y[i] = acc;
  }
  for (std::size_t i = n; i-- > 0;) {
    const auto r = lu_.row(i);
    double acc = y[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= r[j] * y[j];
    y[i] = acc / r[i];
  }
  std::copy(y.begin(), y.end(), b.begin());
}

std::vector<double> LuFactorization::solve(std::span<const double> b) const {
  std::vector<double> x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

double relative_residual(const Matrix& a, std::span<const double> x, std::span<const double> b) {
  const auto ax = a.multiply(x);
  double r = 0.0;
  double a_norm = 0.0;
  double xn = 0.0;
  double bn = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    r = std::max(r, std::abs(ax[i] - b[i]));
    double row = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) row += std::abs(a(i, j));
    a_norm = std::max(a_norm, row);
    bn = std::max(bn, std::abs(b[i]));
  }
  for (double v : x) xn = std::max(xn, std::abs(v));
  const double den = a_norm * xn + bn;
  return den > 0.0 ? r / den : r;
}

SolveResult solve(const DenseSystem& system) {
  LuFactorization lu(system.a);
  SolveResult out;
  out.solutions.reserve(system.rhs.size());
  out.residuals.reserve(system.rhs.size());
  for (const auto& b : system.rhs) {
    auto x = lu.solve(b);
    out.residuals.push_back(relative_residual(system.a, x, b));
    out.solutions.push_back(std::move(x));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Moments from transforms

namespace {

constexpr std::array<double, 5> kFirstDerivativeStencil = {-25.0, 48.0, -36.0, 16.0, -3.0};
constexpr std::array<double, 5> kSecondDerivativeStencil = {35.0, -104.0, 114.0, -56.0, 11.0};
constexpr int kRichardsonLevels = 4;

}  // namespace

MomentEstimate lst_moment(const std::function<double(double)>& f, int order, double time_scale) {
  if (order != 1 && order != 2) throw InvalidArgument("lst_moment supports orders 1 and 2");
  if (!(time_scale > 0.0) || !std::isfinite(time_scale)) time_scale = 1.0;

  const double f0 = f(0.0);
  if (!(std::abs(f0 - 1.0) <= 1e-12)) {
    throw InvalidTransformError("transform does not equal 1 at s = 0 (got " +
                                std::to_string(f0) + ")");
  }

  const auto& stencil = order == 1 ? kFirstDerivativeStencil : kSecondDerivativeStencil;
  const int leading = order == 1 ? 4 : 3;
  const double sign = order == 1 ? -1.0 : 1.0;
  const double h0 = 1e-3 / time_scale;

  std::array<std::array<double, kRichardsonLevels>, kRichardsonLevels> table{};
  double h = h0;
  double fmax = std::abs(f0);
  double last_h = h0;
  for (int level = 0; level < kRichardsonLevels; ++level) {
    double acc = stencil[0] * f0;
    for (int i = 1; i < 5; ++i) {
      const double v = f(i * h);
      fmax = std::max(fmax, std::abs(v));
      acc += stencil[static_cast<std::size_t>(i)] * v;
    }
    table[level][0] = sign * acc / (12.0 * std::pow(h, order));
    last_h = h;
    h *= 0.5;
  }
  for (int j = 1; j < kRichardsonLevels; ++j) {
    const double factor = std::pow(2.0, leading + j - 1) - 1.0;
    for (int i = j; i < kRichardsonLevels; ++i) {
      table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / factor;
    }
  }

  MomentEstimate out;
  const auto& raw = table;
  // Divergence: the raw estimates keep growing under refinement instead of settling.
  bool growing = true;
  for (int i = 1; i < kRichardsonLevels; ++i) {
    if (!(raw[i][0] > raw[i - 1][0])) growing = false;
  }
  const double spread = raw[kRichardsonLevels - 1][0] - raw[0][0];
  if (growing && spread > 1e-6 * std::abs(raw[kRichardsonLevels - 1][0])) {
    const double d1 = raw[2][0] - raw[1][0];
    const double d2 = raw[3][0] - raw[2][0];
    if (d1 > 0.0 && d2 > 0.5 * d1) {
      out.value = std::numeric_limits<double>::infinity();
      out.error = std::numeric_limits<double>::infinity();
      out.infinite = true;
      return out;
    }
  }

  constexpr int last = kRichardsonLevels - 1;
  out.value = table[last][last];
  double stencil_norm = 0.0;
  for (double c : stencil) stencil_norm += std::abs(c);
  const double roundoff = 4.0 * std::numeric_limits<double>::epsilon() * fmax * stencil_norm /
                          (12.0 * std::pow(last_h, order));
  out.error = std::max(std::abs(table[last][last] - table[last][last - 1]),
                       std::abs(table[last][last] - table[last - 1][last - 1])) +
              roundoff;
  return out;
}

// ---------------------------------------------------------------------------

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

namespace {

constexpr std::array<double, 5> kGaussNodes = {0.1488743389816312108848260, 0.4333953941292471907992659,
                                               0.6794095682990244062343274, 0.8650633666889845107320967,
                                               0.9739065285171717200779640};
constexpr std::array<double, 5> kGaussWeights = {0.2955242247147528701738930, 0.2692667193099963550912269,
                                                 0.2190863625159820439955349, 0.1494513491505805931457763,
                                                 0.0666713443086881375935688};

struct Panel {
  double a;
  double b;
  double estimate;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

double gauss10(const std::function<double(double)>& f, double a, double b, std::size_t& evals,
               bool& nonfinite) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < kGaussNodes.size(); ++i) {
    const double dx = half * kGaussNodes[i];
    const double lo = f(mid - dx);
    const double hi = f(mid + dx);
    if (!std::isfinite(lo) || !std::isfinite(hi)) nonfinite = true;
    acc += kGaussWeights[i] * (lo + hi);
  }
  evals += 10;
  return acc * half;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 QuadratureReport* report) {
  QuadratureReport local;
  QuadratureReport& rep = report ? *report : local;
  rep = {};
  if (a == b) return 0.0;

  constexpr std::size_t kMaxEvaluations = 400000;
  auto make_panel = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double whole = gauss10(f, lo, hi, rep.evaluations, rep.nonfinite);
    const double split =
        gauss10(f, lo, mid, rep.evaluations, rep.nonfinite) + gauss10(f, mid, hi, rep.evaluations, rep.nonfinite);
    return Panel{lo, hi, split, std::abs(split - whole)};
  };

  std::priority_queue<Panel> panels;
  panels.push(make_panel(a, b));
  double total = panels.top().estimate;
  double total_error = panels.top().error;
  while (!rep.nonfinite) {
    const double target = rel_tol * std::abs(total);
    if (total_error <= target || total_error < 1e-300) break;
    if (rep.evaluations > kMaxEvaluations) {
      rep.converged = false;
      break;
    }
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      rep.converged = false;
      panels.push(worst);
      break;
    }
    const Panel left = make_panel(worst.a, mid);
    const Panel right = make_panel(mid, worst.b);
    total += left.estimate + right.estimate - worst.estimate;
    total_error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  if (rep.nonfinite) {
    rep.error_estimate = std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::infinity();
  }
  // Re-add the panels in a fixed order so the result does not carry drift from the
  // incremental updates above.
  std::vector<Panel> all;
  all.reserve(panels.size());
  while (!panels.empty()) {
    all.push_back(panels.top());
    panels.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  CompensatedSum sum;
  CompensatedSum err;
  for (const auto& p : all) {
    sum.add(p.estimate);
    err.add(p.error);
  }
  rep.error_estimate = err.value();
  return sum.value();
}

double golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                               double rel_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int iter = 0; iter < 200 && (hi - lo) > rel_tol * std::abs(0.5 * (lo + hi)); ++iter) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    }
  }
  return 0.5 * (lo + hi);
}

double find_root(const std::function<double(double)>& f, double lo, double hi, double abs_tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw InvalidArgument("find_root: interval does not bracket a root");
  int side = 0;
  for (int iter = 0; iter < 300; ++iter) {
    double x = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx > 0.0) == (flo > 0.0)) {
      lo = x;
      flo = fx;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = x;
      fhi = fx;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
    if (hi - lo <= abs_tol) break;
  }
  return 0.5 * (lo + hi);
}

double one_minus_x_over_expm1(double x) {
  if (x < 0.1) {
    const double x2 = x * x;
    return x / 2.0 - x2 / 12.0 + x2 * x2 / 720.0 - x2 * x2 * x2 / 30240.0 +
           x2 * x2 * x2 * x2 / 1209600.0;
  }
  const double denom = std::expm1(x);
  if (std::isinf(denom)) return 1.0;
  return 1.0 - x / denom;
}

}  // namespace gapcap::numerics
