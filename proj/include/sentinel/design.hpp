#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sentinel/dataset.hpp"
#include "sentinel/effort_model.hpp"
#include "sentinel/payment.hpp"

namespace sentinel {

enum class TauStrategy { column, binary_calibrated, residual_oracle };

/// Per-instance conditional squared prediction error estimates.
///   column            - copy the dataset's uncertainty column
///   binary_calibrated - p_hat (1 - p_hat) for probabilistic binary scores
///   residual_oracle   - realized (y_true - prediction)^2; synthetic data only
std::vector<double> estimate_tau(const Dataset& dataset, TauStrategy strategy);

struct DesignProblem {
  std::vector<double> tau;
  double budget = 1.0;
  double w0 = 0.0;
  double k = 0.0;
  EffortModel model = EffortModel::standard();
  std::optional<double> pinned_rho;
  std::optional<double> pinned_bonus;
  CostMode cost_mode = CostMode::eq2;
  double pi_floor = 1e-4;  // sampling floor for instances with tau-hat = 0

  void validate() const;
};

/// A sampling plan: per-instance query probabilities, the sentinel scheme
/// generating them, the implied rational efforts, and bookkeeping.
struct SamplingDesign {
  std::vector<double> pi;
  SentinelScheme scheme;
  std::vector<double> efforts;
  double objective_value = 0.0;
  double expected_cost_value = 0.0;
  CostMode cost_mode = CostMode::eq2;
};

/// Value of the variance surrogate the optimal designs minimize:
///   (1/n) sum_i tau_i / ((1 - rho) pi_i q(e_i)).
double weighted_objective(const SamplingDesign& design,
                          std::span<const double> tau,
                          const EffortModel& model);

/// Proportional allocation pi_i = lambda * weights_i with lambda chosen so the
/// sampling budget binds, probabilities capped at one with iterative
/// re-solving over the uncapped set, and a fixed floor wherever the weight is
/// exactly zero. unit_costs[i] is the expected cost of raising pi_i by one.
std::vector<double> proportional_allocation(std::span<const double> weights,
                                            std::span<const double> unit_costs,
                                            double budget, double pi_floor);

/// Optimal design with both the audit rate and the constant bonus pinned:
/// pi proportional to sqrt(tau), budget binding.
SamplingDesign design_fixed_rho_b(const DesignProblem& problem, double rho,
                                  double bonus);

/// Bonus pinned, audit rate free: rho minimizes the scalar budget-variance
/// criterion (golden-section after a bracketing scan); requires the linear
/// correction and quadratic unit-cost families.
SamplingDesign design_fixed_b(const DesignProblem& problem, double bonus);

/// Audit rate pinned, bonus free: closed-form bonus sqrt(w0) / rho; requires
/// linear correction, quadratic unit cost, identity utility and w0 > 0.
SamplingDesign design_fixed_rho(const DesignProblem& problem, double rho);

/// Dispatch on the problem's pins; with everything free, profiles the
/// fixed-rho solution over a rho grid and refines the best bracket.
SamplingDesign solve_design(const DesignProblem& problem);

}  // namespace sentinel
