#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gapcap/errors.hpp"
#include "gapcap/numerics.hpp"
#include "oracles.hpp"

namespace {

using gapcap::numerics::Matrix;

TEST(LuFactorization, SolvesAgainstLongDoubleElimination) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + trial;
    Matrix a(n, n);
    std::vector<std::vector<long double>> al(n, std::vector<long double>(n));
    std::vector<double> b(n);
    std::vector<long double> bl(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        a(r, c) = u(rng) + (r == c ? 2.0 : 0.0);
        al[r][c] = a(r, c);
      }
      b[r] = u(rng);
      bl[r] = b[r];
    }
    const auto x = gapcap::numerics::LuFactorization(a).solve(b);
    const auto ref = gapcap::testing::solve_dense(al, bl);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(x[i], static_cast<double>(ref[i]), 1e-12);
    EXPECT_LT(gapcap::numerics::relative_residual(a, x, b), 1e-15);
  }
}

TEST(LuFactorization, PivotsAcrossBadlyScaledRows) {
  const auto a = Matrix::from_rows({{1e-20, 1.0}, {1.0, 1.0}});
  const std::vector<double> b{1.0, 2.0};
  const auto x = gapcap::numerics::LuFactorization(a).solve(b);
  EXPECT_NEAR(x[0], 1.0, 1e-14);
  EXPECT_NEAR(x[1], 1.0, 1e-14);
}

TEST(LuFactorization, SingularThrowsWithPivotIndex) {
  const auto a = Matrix::from_rows({{1.0, 2.0, 3.0}, {2.0, 4.0, 6.0}, {0.0, 1.0, 1.0}});
  try {
    gapcap::numerics::LuFactorization f(a);
    FAIL() << "expected SingularMatrixError";
  } catch (const gapcap::SingularMatrixError& e) {
    EXPECT_LE(e.pivot_index(), 2u);
  }
}

TEST(Solve, MultipleRightHandSidesAndResiduals) {
  gapcap::numerics::DenseSystem sys{Matrix::from_rows({{4.0, 1.0}, {1.0, 3.0}}), {{1.0, 2.0}, {0.0, 0.0}}};
  const auto res = gapcap::numerics::solve(sys);
  ASSERT_EQ(res.solutions.size(), 2u);
  EXPECT_NEAR(res.solutions[0][0], 1.0 / 11.0, 1e-15);
  EXPECT_NEAR(res.solutions[0][1], 7.0 / 11.0, 1e-15);
  EXPECT_EQ(res.solutions[1][0], 0.0);
  for (double r : res.residuals) EXPECT_LT(r, 1e-15);
}

TEST(Solve, SmallHandSystems) {
  gapcap::numerics::DenseSystem id{Matrix::identity(3), {{1.0, -2.0, 3.0}}};
  EXPECT_EQ(gapcap::numerics::solve(id).solutions[0], (std::vector<double>{1.0, -2.0, 3.0}));
  gapcap::numerics::DenseSystem two{Matrix::from_rows({{2.0, 1.0}, {1.0, 3.0}}), {{3.0, 5.0}}};
  const auto x = gapcap::numerics::solve(two).solutions[0];
  EXPECT_NEAR(x[0], 0.8, 1e-15);
  EXPECT_NEAR(x[1], 1.4, 1e-15);
  const double q = 0.3, kappa = 0.2, rho = q + kappa;
  gapcap::numerics::DenseSystem one{Matrix::from_rows({{1.0 - q / rho}}), {{kappa / rho}}};
  EXPECT_NEAR(gapcap::numerics::solve(one).solutions[0][0], 1.0, 1e-15);
}

TEST(RelativeResidual, IsScaleInvariant) {
  const auto a = Matrix::from_rows({{2.0, 0.0}, {0.0, 1.0}});
  const std::vector<double> x{1.0, 1.0}, b{2.0, 1.5};
  const double r = gapcap::numerics::relative_residual(a, x, b);
  // |b - Ax| = 0.5, |A| |x| = 2, |b| = 2
  EXPECT_NEAR(r, 0.125, 1e-15);
  const auto a2 = Matrix::from_rows({{2e6, 0.0}, {0.0, 1e6}});
  const std::vector<double> b2{2e6, 1.5e6};
  EXPECT_NEAR(gapcap::numerics::relative_residual(a2, x, b2), 0.125, 1e-15);
}

TEST(LstMoment, ExponentialMoments) {
  const double mu = 0.3;
  auto f = [mu](double s) { return mu / (mu + s); };
  const auto m1 = gapcap::numerics::lst_moment(f, 1, 1.0 / mu);
  const auto m2 = gapcap::numerics::lst_moment(f, 2, 1.0 / mu);
  EXPECT_NEAR(m1.value, 1.0 / mu, 1e-8 / mu);
  EXPECT_NEAR(m2.value, 2.0 / (mu * mu), 1e-6 / (mu * mu));
  EXPECT_FALSE(m1.infinite);
}

TEST(LstMoment, DegenerateAndServiceTransforms) {
  const auto d = gapcap::numerics::lst_moment([](double s) { return std::exp(-7.0 * s); }, 1, 7.0);
  EXPECT_NEAR(d.value, 7.0, 1e-6);
  EXPECT_LE(std::fabs(d.value - 7.0), std::max(d.error, 1e-12));
  const double a = 1.0 / 7.0;
  const auto e = gapcap::numerics::lst_moment([a](double s) { return a / (a + s); }, 2, 7.0);
  EXPECT_NEAR(e.value / 98.0, 1.0, 1e-3);
  EXPECT_LE(std::fabs(e.value - 98.0), std::max(e.error, 1e-9 * 98.0));
  const double q = 1.0 / 60.0;
  const auto b1 = gapcap::numerics::lst_moment(
      [q](double s) {
        const double x = std::exp(-(s + q) * 7.0);
        return x / (1.0 - q / (s + q) * (1.0 - x));
      },
      1, 7.4);
  EXPECT_NEAR(b1.value, std::expm1(7.0 * q) / q, 1e-6);
  EXPECT_NEAR(b1.value, 7.425, 1e-3);
}

TEST(LstMoment, RejectsNonTransforms) {
  EXPECT_THROW(gapcap::numerics::lst_moment([](double s) { return 2.0 - s; }, 1), gapcap::InvalidTransformError);
}

TEST(CompensatedSum, RecoversSmallTerms) {
  gapcap::numerics::CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  EXPECT_EQ(s.value(), 1000.0);
}

TEST(Integrate, SmoothAndPeaked) {
  EXPECT_NEAR(gapcap::numerics::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-12), 2.0,
              1e-12);
  gapcap::numerics::QuadratureReport rep;
  const double v = gapcap::numerics::integrate([](double x) { return std::exp(-1e4 * (x - 0.3) * (x - 0.3)); }, 0.0,
                                               1.0, 1e-10, &rep);
  EXPECT_NEAR(v, std::sqrt(std::numbers::pi / 1e4), 1e-10);
  EXPECT_TRUE(rep.converged);
  EXPECT_GT(rep.evaluations, 10u);
}

TEST(Integrate, NonFiniteNodesGiveInfinity) {
  gapcap::numerics::QuadratureReport rep;
  const double v = gapcap::numerics::integrate([](double) { return INFINITY; }, 0.0, 1.0, 1e-8, &rep);
  EXPECT_TRUE(std::isinf(v));
  EXPECT_TRUE(rep.nonfinite);
}

TEST(GoldenSection, FindsMaximum) {
  const double x = gapcap::numerics::golden_section_maximize([](double t) { return -(t - 1.7) * (t - 1.7); }, 0.0,
                                                             5.0, 1e-10);
  EXPECT_NEAR(x, 1.7, 1e-6);
}

TEST(FindRoot, Cubic) {
  const double r = gapcap::numerics::find_root([](double x) { return x * x * x - 2.0; }, 0.0, 2.0, 1e-14);
  EXPECT_NEAR(r, std::cbrt(2.0), 1e-13);
}

TEST(OneMinusXOverExpm1, SmallAndLarge) {
  EXPECT_NEAR(gapcap::numerics::one_minus_x_over_expm1(1e-10), 0.5e-10 - 1e-20 / 12.0, 1e-26);
  EXPECT_EQ(gapcap::numerics::one_minus_x_over_expm1(0.0), 0.0);
  EXPECT_NEAR(gapcap::numerics::one_minus_x_over_expm1(2.0), 1.0 - 2.0 / std::expm1(2.0), 1e-15);
  EXPECT_NEAR(gapcap::numerics::one_minus_x_over_expm1(800.0), 1.0, 1e-15);
}

}  // namespace
