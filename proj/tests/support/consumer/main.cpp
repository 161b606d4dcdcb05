#include <cmath>
#include <cstdio>

#include <gapcap/poisson_core.hpp>

int main() {
  const double c = gapcap::capacity(gapcap::Behavior::B1, gapcap::HeadwayDistribution::deterministic(7.0), 1.0 / 6.0);
  const double expected = (1.0 / 6.0) / std::expm1(7.0 / 6.0);
  std::printf("%.12g\n", c);
  return std::fabs(c - expected) < 1e-12 ? 0 : 1;
}
