#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

// Test-side references written from first principles in long double.
namespace gapcap::testing {

/// E[Y], E[Y^2] for a fixed critical headway t under Poisson(q): a geometric number of
/// failed gaps (each exponential conditioned below t), then t itself.
inline std::pair<long double, long double> renewal_fixed(long double t, long double q) {
  const long double p = std::exp(-q * t);
  const long double en = (1 - p) / p;
  const long double g1 = (1 - p * (1 + q * t)) / q;
  const long double g2 = (2 - p * (q * q * t * t + 2 * q * t + 2)) / (q * q);
  const long double m = g1 / (1 - p);
  const long double s = g2 / (1 - p);
  return {en * m + t, en * s + 2 * en * en * m * m + 2 * en * m * t + t * t};
}

/// Gauss-Jordan with partial pivoting on a copy.
inline std::vector<long double> solve_dense(std::vector<std::vector<long double>> a, std::vector<long double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    }
    if (a[piv][c] == 0) throw std::runtime_error("singular");
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const long double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t r = 0; r < n; ++r) b[r] /= a[r][r];
  return b;
}

/// Mean service time under impatience with fixed headways t_1, t_2, ... (the last one
/// repeats), by the attempt recursion E[Y] = sum_k P(reach k) (E[fail gap; fail] + t_k P(success)).
inline long double impatient_fixed_mean(const std::vector<long double>& t, long double q, std::size_t terms) {
  long double reach = 1;
  long double total = 0;
  for (std::size_t k = 0; k < terms; ++k) {
    const long double tk = t[std::min(k, t.size() - 1)];
    const long double p = std::exp(-q * tk);
    const long double fail_mass = (1 - p * (1 + q * tk)) / q;
    total += reach * (fail_mass + tk * p);
    reach *= 1 - p;
  }
  return total;
}

}  // namespace gapcap::testing
