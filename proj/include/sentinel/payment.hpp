#pragma once

#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "sentinel/effort_model.hpp"

namespace sentinel {

/// How the fixed sentinel operating cost k enters the cost accounting:
/// eq2 charges a single rho * k term; per_sentinel (experimental) charges k
/// for every sentinel task actually created.
enum class CostMode { eq2, per_sentinel };

/// Pay a flat reward for each correct output, optionally only on a randomly
/// checked subset of tasks.
struct LinearAccuracyPayment {
  double reward_per_correct = 0.0;
  double check_probability = 1.0;

  void validate() const;
};

/// Bonus paid on a correctly answered sentinel task: either one constant or a
/// per-instance schedule aligned with the dataset.
class BonusSchedule {
 public:
  BonusSchedule(double constant);  // NOLINT: implicit by design
  static BonusSchedule per_instance(std::vector<double> values);

  double at(std::size_t i) const;
  bool is_constant() const;
  double constant_value() const;
  const std::vector<double>& schedule() const;

 private:
  std::variant<double, std::vector<double>> values_;
};

/// Sentinel-auditing payment scheme: audit rate rho, bonus schedule, flat
/// per-sampled-instance overhead w0 and sentinel operating cost k.
/// rho = 0 describes the no-sentinel configuration used by baselines.
struct SentinelScheme {
  double rho = 0.1;
  BonusSchedule bonus{0.0};
  double w0 = 0.0;
  double k = 0.0;

  void validate() const;
};

/// Agent's expected payoff per task under the linear accuracy scheme with a
/// risk-neutral agent: R * check * (1 - p + p q(e)) - c(e).
double agent_payoff_linear(const LinearAccuracyPayment& scheme,
                           const EffortModel& model, double ai_error_prob,
                           double effort);

/// Agent's expected payoff per sampled task under sentinel auditing:
/// rho * q(e) * mu(b(x)) + mu(w0) - c(e).
double agent_payoff_sentinel(const SentinelScheme& scheme,
                             const EffortModel& model, double x_bonus,
                             double effort);

struct LinearPaymentRequirement {
  double reward = 0.0;            // smallest per-correct reward R*
  double expected_payment = 0.0;  // E[W] = R* (1 - p + p q(e_min))
};

/// Minimal expected payment under the linear accuracy scheme that keeps the
/// agent's best response at or above e_min when the AI errs with
/// probability p. Derived from the binding first-order condition.
LinearPaymentRequirement required_linear_payment(double e_min, double p,
                                                 const EffortModel& model);

struct CollapsePoint {
  double p = 0.0;
  double required_payment = 0.0;
};

/// required_linear_payment evaluated along a decreasing grid of error
/// probabilities; exhibits the payment divergence as p -> 0.
std::vector<CollapsePoint> collapse_curve(double e_min,
                                          const EffortModel& model,
                                          std::span<const double> p_grid);

/// CSV emission with header "p,required_payment".
void write_collapse_csv(std::span<const CollapsePoint> series,
                        std::ostream& out);

/// Expected principal cost of a sampled design:
///   sum_i (rho * b(x_i) * q(e_i) + w0) * pi_i + rho * k      (eq2 mode)
/// The per_sentinel mode replaces rho * k with k * rho * sum_i pi_i.
/// Deliberately takes no AI error probabilities: sentinel costs do not
/// depend on how accurate the AI is.
double expected_cost(const SentinelScheme& scheme, std::span<const double> pi,
                     std::span<const double> efforts, const EffortModel& model,
                     CostMode mode = CostMode::eq2);

}  // namespace sentinel
