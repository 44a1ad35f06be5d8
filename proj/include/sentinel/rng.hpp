#pragma once

#include <cstdint>

namespace sentinel {

/// Counter-based pseudo-random generator.
///
/// Every output is a pure function of (seed, stream, substream, counter), so
/// draws keyed by instance id and draw purpose are identical no matter which
/// thread or iteration order produces them. The word function is a cascade of
/// 64-bit finalizer mixes (murmur3-style), one injection per key word.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0,
                      std::uint64_t substream = 0);

  std::uint64_t next_u64();
  /// Uniform draw in the open interval (0, 1).
  double next_uniform();
  bool next_bernoulli(double p);
  /// Standard normal via the inverse-CDF transform (one uniform per draw).
  double next_normal();
  /// Marsaglia-Tsang gamma; shape > 0.
  double next_gamma(double shape);
  double next_beta(double a, double b);

  /// Word at an explicit counter without advancing internal state.
  std::uint64_t at(std::uint64_t counter) const;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Deterministically derives a child seed from a parent seed and two labels.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

}  // namespace sentinel
