#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gapcap::numerics {

/// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double> multiply(std::span<const double> x) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// A square system A x = rhs_k with one or more right-hand sides sharing A.
struct DenseSystem {
  Matrix a;
  std::vector<std::vector<double>> rhs;
};

struct SolveResult {
  std::vector<std::vector<double>> solutions;
  /// ||A x - b||_inf / ||b||_inf for each right-hand side (absolute when b = 0).
  std::vector<double> residuals;
};

/// LU factorization with scaled partial pivoting. Throws SingularMatrixError when a
/// pivot is below 1e-13 times the scale of the row it came from.
class LuFactorization {
 public:
  explicit LuFactorization(Matrix a);

  std::size_t size() const noexcept { return lu_.rows(); }
  std::vector<double> solve(std::span<const double> b) const;
  void solve_in_place(std::span<double> b) const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
};

SolveResult solve(const DenseSystem& system);

/// Normwise backward error |b - Ax| / (|A| |x| + |b|) in the infinity norm.
double relative_residual(const Matrix& a, std::span<const double> x, std::span<const double> b);

/// Moment extracted from a Laplace–Stieltjes transform.
struct MomentEstimate {
  double value = 0.0;
  double error = 0.0;
  bool infinite = false;
};

/// (-1)^order * f^{(order)}(0) from one-sided 5-point differences with four levels of
/// Richardson extrapolation. `time_scale` is a guess for E[Y]; the first step is
/// 1e-3 / time_scale. Throws InvalidTransformError when |f(0) - 1| > 1e-12.
MomentEstimate lst_moment(const std::function<double(double)>& f, int order,
                          double time_scale = 1.0);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

struct QuadratureReport {
  std::size_t evaluations = 0;
  double error_estimate = 0.0;
  bool converged = true;
  bool nonfinite = false;
};

/// Adaptive 10-point Gauss–Legendre on [a, b]: a panel is accepted when the one-panel
/// and two-half-panel estimates agree to `rel_tol`. Returns +inf when any node does.
double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 QuadratureReport* report = nullptr);

/// Golden-section search for an extremum of f on [lo, hi].
double golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                               double rel_tol);

/// Bracketed root by bisection refined with the secant step (Illinois variant).
double find_root(const std::function<double(double)>& f, double lo, double hi, double abs_tol);

/// 1 - x / (e^x - 1) without cancellation, for x >= 0.
double one_minus_x_over_expm1(double x);

}  // namespace gapcap::numerics
