#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sentinel/dataset.hpp"
#include "sentinel/design.hpp"

namespace sentinel {

/// Outcome of dispatching one instance in a labeling round.
struct LabelOutcome {
  std::uint64_t id = 0;
  bool sampled = false;
  bool regular = false;  // sampled and the AI behaved normally
  std::optional<double> label;
  double bonus_paid = 0.0;
  double base_paid = 0.0;
  double effort = 0.0;
};

struct SimulateOptions {
  int threads = 1;  // > 1 splits instances across workers
};

/// Runs one labeling round. Per instance: the sampling indicator, the
/// sentinel designation, the AI error and the human correction are drawn
/// from counter streams keyed by (seed, instance id, draw index), so the
/// outcome list is identical no matter how iteration is ordered or split.
///
/// Sentinel tasks force the AI output to y_false; regular tasks see an AI
/// error with probability ai_error_prob. A human at effort e detects and
/// corrects an error with probability q(e); an uncorrected output is
/// submitted as the label. The bonus is paid only on a correctly answered
/// sentinel, the base payment w0 on every sampled instance.
std::vector<LabelOutcome> simulate_round(const Dataset& dataset,
                                         const SamplingDesign& design,
                                         const EffortModel& model,
                                         std::uint64_t seed,
                                         const SimulateOptions& options = {});

/// Total payout of a round plus the sentinel operating cost: rho * k under
/// the eq2 mode, k per realized sentinel task under the experimental mode.
double realized_cost(std::span<const LabelOutcome> outcomes,
                     const SentinelScheme& scheme,
                     CostMode mode = CostMode::eq2);

}  // namespace sentinel
