#include "gapcap/random.hpp"

#include <cmath>

namespace gapcap {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t RandomStream::mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t RandomStream::derive_key(std::uint64_t master_seed, std::uint64_t replication,
                                       Role role) noexcept {
  const std::uint64_t r = static_cast<std::uint64_t>(role);
  return mix(mix(master_seed) ^ (mix(replication + 1) * 3) ^ (r * kGamma));
}

std::uint64_t RandomStream::next_u64() noexcept {
  ++counter_;
  return mix(key_ + counter_ * kGamma);
}

double RandomStream::uniform() noexcept {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

double RandomStream::standard_normal() noexcept {
  // polar Box–Muller, second value discarded to keep draws stateless
  for (;;) {
    const double u = 2.0 * uniform() - 1.0;
    const double v = 2.0 * uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double RandomStream::gamma(double shape, double rate) noexcept {
  if (shape < 1.0) {
    const double boost = std::pow(uniform(), 1.0 / shape);
    return gamma(shape + 1.0, rate) * boost;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = standard_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

std::size_t RandomStream::categorical(std::span<const double> weights) noexcept {
  const double u = uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.empty() ? 0 : weights.size() - 1;
}

}  // namespace gapcap
