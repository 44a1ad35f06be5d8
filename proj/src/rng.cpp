#include "sentinel/rng.hpp"

#include <cmath>

#include "sentinel/errors.hpp"
#include "sentinel/stats.hpp"

namespace sentinel {
namespace {

inline std::uint64_t fmix64(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

constexpr std::uint64_t kPhi = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t absorb(std::uint64_t state, std::uint64_t word) {
  return fmix64(state ^ (word * kPhi + 0x2545f4914f6cdd1dULL));
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t substream) {
  std::uint64_t s = fmix64(seed + kPhi);
  s = absorb(s, stream);
  key_ = absorb(s, substream);
}

std::uint64_t CounterRng::at(std::uint64_t counter) const {
  return absorb(key_, counter);
}

std::uint64_t CounterRng::next_u64() { return at(counter_++); }

double CounterRng::next_uniform() {
  // (x >> 11) spans [0, 2^53); the half-step keeps the value in (0,1).
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

bool CounterRng::next_bernoulli(double p) { return next_uniform() < p; }

double CounterRng::next_normal() {
  return stats::inverse_normal_cdf(next_uniform());
}

double CounterRng::next_gamma(double shape) {
  if (!(shape > 0.0)) throw DomainError("gamma shape must be positive");
  if (shape < 1.0) {
    const double boost = std::pow(next_uniform(), 1.0 / shape);
    return next_gamma(shape + 1.0) * boost;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = next_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = next_uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double CounterRng::next_beta(double a, double b) {
  const double ga = next_gamma(a);
  const double gb = next_gamma(b);
  const double sum = ga + gb;
  if (sum <= 0.0) return 0.5;
  return ga / sum;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                          std::uint64_t b) {
  return absorb(absorb(fmix64(seed + kPhi), a), b);
}

}  // namespace sentinel
