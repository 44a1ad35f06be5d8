#include "sentinel/simulate.hpp"

#include <algorithm>
#include <thread>

#include "sentinel/errors.hpp"
#include "sentinel/rng.hpp"

namespace sentinel {

namespace {

// Draw indices within an instance's stream.
enum SimDraw : std::uint64_t {
  kSample = 0,
  kSentinel = 1,
  kAiError = 2,
  kCorrection = 3,
};

LabelOutcome simulate_instance(const Instance& inst, double pi, double effort,
                               double bonus, const SentinelScheme& scheme,
                               const EffortModel& model, std::uint64_t seed) {
  LabelOutcome out;
  out.id = inst.id;
  out.effort = effort;

  CounterRng sample_rng(seed, inst.id, kSample);
  out.sampled = sample_rng.next_bernoulli(pi);
  if (!out.sampled) return out;  // regular stays false for unsampled tasks

  CounterRng sentinel_rng(seed, inst.id, kSentinel);
  out.regular = sentinel_rng.next_bernoulli(1.0 - scheme.rho);

  double ai_output;
  if (!out.regular) {
    ai_output = inst.y_false;  // forced error
  } else {
    CounterRng error_rng(seed, inst.id, kAiError);
    ai_output = error_rng.next_bernoulli(inst.ai_error_prob) ? inst.y_false
                                                             : inst.y_true;
  }

  double label = ai_output;
  if (ai_output != inst.y_true) {
    CounterRng correction_rng(seed, inst.id, kCorrection);
    if (correction_rng.next_bernoulli(model.q(effort))) label = inst.y_true;
  }
  out.label = label;

  out.base_paid = scheme.w0;
  if (!out.regular && label == inst.y_true) out.bonus_paid = bonus;
  return out;
}

}  // namespace

std::vector<LabelOutcome> simulate_round(const Dataset& dataset,
                                         const SamplingDesign& design,
                                         const EffortModel& model,
                                         std::uint64_t seed,
                                         const SimulateOptions& options) {
  const std::size_t n = dataset.size();
  if (design.pi.size() != n || design.efforts.size() != n)
    throw DomainError("simulate_round: design does not cover the dataset");
  design.scheme.validate();

  std::vector<LabelOutcome> outcomes(n);
  const auto run_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      outcomes[i] = simulate_instance(
          dataset.instances[i], design.pi[i], design.efforts[i],
          design.scheme.bonus.at(i), design.scheme, model, seed);
    }
  };

  const int threads = std::max(1, options.threads);
  if (threads == 1 || n < 2048) {
    run_range(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::size_t lo = std::min(n, t * chunk);
      const std::size_t hi = std::min(n, lo + chunk);
      if (lo < hi) pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return outcomes;
}

double realized_cost(std::span<const LabelOutcome> outcomes,
                     const SentinelScheme& scheme, CostMode mode) {
  double total = 0.0;
  std::size_t sentinels = 0;
  for (const auto& o : outcomes) {
    total += o.bonus_paid + o.base_paid;
    if (o.sampled && !o.regular) ++sentinels;
  }
  if (mode == CostMode::eq2)
    total += scheme.rho * scheme.k;
  else
    total += scheme.k * static_cast<double>(sentinels);
  return total;
}

}  // namespace sentinel
