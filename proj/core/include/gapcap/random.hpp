#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace gapcap {

/// Counter-based generator: draw n of a stream with key K is mix(K + n * gamma), where
/// mix is the SplitMix64 finalizer and gamma the golden-ratio increment. A stream owns
/// nothing but (key, counter), so streams never share state.
class RandomStream {
 public:
  enum class Role : std::uint64_t { Major = 1, Headway = 2, Minor = 3, Trace = 4 };

  explicit RandomStream(std::uint64_t key) noexcept : key_(key) {}

  /// Key for (master seed, replication index, role):
  /// mix(mix(seed) ^ mix(replication + 1) * 3 ^ role * gamma).
  static std::uint64_t derive_key(std::uint64_t master_seed, std::uint64_t replication, Role role) noexcept;
  static RandomStream for_replication(std::uint64_t master_seed, std::uint64_t replication, Role role) noexcept {
    return RandomStream(derive_key(master_seed, replication, role));
  }

  static std::uint64_t mix(std::uint64_t z) noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  double exponential(double rate) noexcept;
  double standard_normal() noexcept;
  /// Marsaglia–Tsang; shapes below one are boosted by U^{1/shape}.
  double gamma(double shape, double rate) noexcept;
  /// Index drawn with probability proportional to weights (which must sum to ~1).
  std::size_t categorical(std::span<const double> weights) noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace gapcap
