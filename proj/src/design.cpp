#include "sentinel/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sentinel/effort_solver.hpp"
#include "sentinel/errors.hpp"
#include "sentinel/numeric.hpp"

namespace sentinel {

namespace {
constexpr double kRhoBracketEps = 1e-4;
constexpr double kRhoSearchTol = 1e-8;
}  // namespace

std::vector<double> estimate_tau(const Dataset& dataset, TauStrategy strategy) {
  std::vector<double> tau;
  tau.reserve(dataset.size());
  switch (strategy) {
    case TauStrategy::column:
      for (const auto& inst : dataset.instances) {
        if (!inst.uncertainty)
          throw DataError("estimate_tau: instance " + std::to_string(inst.id) +
                          " lacks an uncertainty value");
        tau.push_back(*inst.uncertainty);
      }
      break;
    case TauStrategy::binary_calibrated:
      if (dataset.kind != TaskKind::binary)
        throw DataError("estimate_tau: binary-calibrated strategy needs a "
                        "binary dataset");
      for (const auto& inst : dataset.instances)
        tau.push_back(inst.prediction * (1.0 - inst.prediction));
      break;
    case TauStrategy::residual_oracle:
      for (const auto& inst : dataset.instances) {
        const double r = inst.y_true - inst.prediction;
        tau.push_back(r * r);
      }
      break;
  }
  return tau;
}

void DesignProblem::validate() const {
  if (!(budget > 0.0)) throw DomainError("design problem: budget must be > 0");
  if (!(w0 >= 0.0)) throw DomainError("design problem: w0 must be >= 0");
  if (!(k >= 0.0)) throw DomainError("design problem: k must be >= 0");
  if (!(pi_floor > 0.0 && pi_floor <= 1.0))
    throw DomainError("design problem: pi floor must lie in (0, 1]");
  bool any_positive = false;
  for (double t : tau) {
    if (!(t >= 0.0) || !std::isfinite(t))
      throw DomainError("design problem: tau must be finite and >= 0");
    any_positive = any_positive || t > 0.0;
  }
  if (!any_positive)
    throw DomainError("design problem: at least one tau must be positive");
}

double weighted_objective(const SamplingDesign& design,
                          std::span<const double> tau,
                          const EffortModel& model) {
  if (tau.size() != design.pi.size())
    throw DomainError("weighted_objective: tau and pi lengths differ");
  const double n = static_cast<double>(tau.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (tau[i] == 0.0) continue;
    const double denom =
        (1.0 - design.scheme.rho) * design.pi[i] * model.q(design.efforts[i]);
    if (!(denom > 0.0))
      throw NumericError(
          "weighted_objective: zero sampling mass on an instance with "
          "positive tau");
    acc += tau[i] / denom;
  }
  return acc / n;
}

std::vector<double> proportional_allocation(std::span<const double> weights,
                                            std::span<const double> unit_costs,
                                            double budget, double pi_floor) {
  if (weights.size() != unit_costs.size())
    throw DomainError("proportional_allocation: size mismatch");
  const std::size_t n = weights.size();
  std::vector<double> pi(n, 0.0);

  double available = budget;
  double weighted_cost = 0.0;
  std::vector<bool> fixed(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(unit_costs[i] > 0.0))
      throw DomainError("proportional_allocation: unit costs must be > 0");
    if (weights[i] == 0.0) {
      pi[i] = pi_floor;
      fixed[i] = true;
      available -= unit_costs[i] * pi_floor;
    } else {
      weighted_cost += unit_costs[i] * weights[i];
    }
  }
  if (available <= 0.0)
    throw InfeasibleError("proportional_allocation: budget exhausted by "
                          "sampling floors");

  // Water-filling: solve for the scale, cap anything above one, re-solve on
  // the rest until the capped set stops growing.
  for (;;) {
    if (weighted_cost <= 0.0) break;  // everything capped or floored
    const double lambda = available / weighted_cost;
    bool new_caps = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (fixed[i] || weights[i] == 0.0) continue;
      if (lambda * weights[i] >= 1.0) {
        pi[i] = 1.0;
        fixed[i] = true;
        available -= unit_costs[i];
        weighted_cost -= unit_costs[i] * weights[i];
        new_caps = true;
      }
    }
    if (!new_caps) {
      if (available < 0.0)
        throw InfeasibleError("proportional_allocation: caps exceed budget");
      for (std::size_t i = 0; i < n; ++i)
        if (!fixed[i]) pi[i] = lambda * weights[i];
      break;
    }
  }
  return pi;
}

namespace {

SamplingDesign build_design(const DesignProblem& problem, double rho,
                            const BonusSchedule& bonus) {
  const std::size_t n = problem.tau.size();
  const double fixed_cost =
      problem.cost_mode == CostMode::eq2 ? rho * problem.k : 0.0;
  if (!(problem.budget - fixed_cost > 0.0))
    throw InfeasibleError("design: budget does not cover the sentinel "
                          "operating cost");

  std::vector<double> efforts(n), unit_costs(n), weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    efforts[i] = sentinel_effort(rho, bonus.at(i), problem.model);
    unit_costs[i] = rho * bonus.at(i) * problem.model.q(efforts[i]) +
                    problem.w0;
    if (problem.cost_mode == CostMode::per_sentinel)
      unit_costs[i] += rho * problem.k;
    weights[i] = std::sqrt(problem.tau[i]);
  }

  SamplingDesign design;
  design.pi = proportional_allocation(weights, unit_costs,
                                      problem.budget - fixed_cost,
                                      problem.pi_floor);
  design.scheme = SentinelScheme{rho, bonus, problem.w0, problem.k};
  design.efforts = std::move(efforts);
  design.cost_mode = problem.cost_mode;
  design.expected_cost_value = expected_cost(
      design.scheme, design.pi, design.efforts, problem.model,
      problem.cost_mode);
  design.objective_value =
      weighted_objective(design, problem.tau, problem.model);
  return design;
}

void require_linear_quadratic_families(const EffortModel& model, const char* what) {
  if (!model.linear_correction() || !model.quadratic_unit_cost())
    throw DomainError(std::string(what) +
                      ": requires the linear correction and quadratic "
                      "unit-cost families");
}

double rho_upper_bracket(const DesignProblem& problem) {
  double hi = 1.0 - kRhoBracketEps;
  if (problem.cost_mode == CostMode::eq2 && problem.k > 0.0)
    hi = std::min(hi, problem.budget / problem.k - kRhoBracketEps);
  if (!(hi > kRhoBracketEps))
    throw InfeasibleError("design: no feasible audit rate");
  return hi;
}

// Minimize profile(rho) on the feasible bracket: bracketing scan, then
// golden-section refinement. Infeasible points evaluate as +inf.
double minimize_rho_profile(const DesignProblem& problem,
                            const std::function<double(double)>& profile) {
  const auto guarded = [&](double rho) {
    try {
      return profile(rho);
    } catch (const InfeasibleError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  const double lo = kRhoBracketEps;
  const double hi = rho_upper_bracket(problem);
  constexpr int kScan = 200;
  int best = -1;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double rho = lo + (hi - lo) * i / kScan;
    const double val = guarded(rho);
    if (val < best_val) {
      best_val = val;
      best = i;
    }
  }
  if (best < 0)
    throw InfeasibleError("design: no feasible audit rate in the bracket");
  const double a = lo + (hi - lo) * std::max(0, best - 1) / kScan;
  const double b = lo + (hi - lo) * std::min(kScan, best + 1) / kScan;
  return numeric::golden_section_min(guarded, a, b, kRhoSearchTol);
}

}  // namespace

SamplingDesign design_fixed_rho_b(const DesignProblem& problem, double rho,
                                  double bonus) {
  problem.validate();
  if (!(rho > 0.0 && rho < 1.0))
    throw DomainError("design_fixed_rho_b: rho must lie in (0, 1)");
  return build_design(problem, rho, BonusSchedule(bonus));
}

SamplingDesign design_fixed_b(const DesignProblem& problem, double bonus) {
  problem.validate();
  require_linear_quadratic_families(problem.model, "design_fixed_b");
  if (!(bonus > 0.0)) throw DomainError("design_fixed_b: bonus must be > 0");
  const double rho = minimize_rho_profile(problem, [&](double r) {
    return build_design(problem, r, BonusSchedule(bonus)).objective_value;
  });
  return build_design(problem, rho, BonusSchedule(bonus));
}

SamplingDesign design_fixed_rho(const DesignProblem& problem, double rho) {
  problem.validate();
  require_linear_quadratic_families(problem.model, "design_fixed_rho");
  if (!problem.model.identity_utility())
    throw DomainError("design_fixed_rho: requires the identity payment "
                      "utility");
  if (!(rho > 0.0 && rho < 1.0))
    throw DomainError("design_fixed_rho: rho must lie in (0, 1)");
  if (!(problem.w0 > 0.0))
    throw DomainError("design_fixed_rho: w0 must be positive (the bonus "
                      "formula degenerates at zero overhead)");
  const double bonus = std::sqrt(problem.w0) / rho;
  return build_design(problem, rho, BonusSchedule(bonus));
}

SamplingDesign solve_design(const DesignProblem& problem) {
  problem.validate();
  if (problem.pinned_rho && problem.pinned_bonus)
    return design_fixed_rho_b(problem, *problem.pinned_rho,
                              *problem.pinned_bonus);
  if (problem.pinned_bonus) return design_fixed_b(problem, *problem.pinned_bonus);
  if (problem.pinned_rho) return design_fixed_rho(problem, *problem.pinned_rho);

  require_linear_quadratic_families(problem.model, "solve_design");
  if (!problem.model.identity_utility())
    throw DomainError("solve_design: free optimization requires the identity "
                      "payment utility");
  if (!(problem.w0 > 0.0))
    throw DomainError("solve_design: free optimization requires w0 > 0");
  const double rho = minimize_rho_profile(problem, [&](double r) {
    return build_design(problem, r,
                        BonusSchedule(std::sqrt(problem.w0) / r))
        .objective_value;
  });
  return design_fixed_rho(problem, rho);
}

}  // namespace sentinel
