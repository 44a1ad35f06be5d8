#include "sentinel/payment.hpp"

#include <cmath>
#include <ostream>

#include "sentinel/errors.hpp"

namespace sentinel {

void LinearAccuracyPayment::validate() const {
  if (!(reward_per_correct >= 0.0))
    throw DomainError("linear payment: reward must be >= 0");
  if (!(check_probability > 0.0 && check_probability <= 1.0))
    throw DomainError("linear payment: check probability must lie in (0, 1]");
}

BonusSchedule::BonusSchedule(double constant) : values_(constant) {
  if (!(constant >= 0.0)) throw DomainError("bonus must be >= 0");
}

BonusSchedule BonusSchedule::per_instance(std::vector<double> values) {
  for (double v : values)
    if (!(v >= 0.0)) throw DomainError("bonus schedule entries must be >= 0");
  BonusSchedule out(0.0);
  out.values_ = std::move(values);
  return out;
}

double BonusSchedule::at(std::size_t i) const {
  if (const double* c = std::get_if<double>(&values_)) return *c;
  const auto& v = std::get<std::vector<double>>(values_);
  if (i >= v.size()) throw DomainError("bonus schedule index out of range");
  return v[i];
}

bool BonusSchedule::is_constant() const {
  return std::holds_alternative<double>(values_);
}

double BonusSchedule::constant_value() const {
  if (!is_constant())
    throw DomainError("bonus schedule is per-instance, not constant");
  return std::get<double>(values_);
}

const std::vector<double>& BonusSchedule::schedule() const {
  if (is_constant())
    throw DomainError("bonus schedule is constant, not per-instance");
  return std::get<std::vector<double>>(values_);
}

void SentinelScheme::validate() const {
  if (!(rho >= 0.0) || rho >= 1.0)
    throw DomainError("sentinel scheme: rho must lie in [0, 1)");
  if (!(w0 >= 0.0)) throw DomainError("sentinel scheme: w0 must be >= 0");
  if (!(k >= 0.0)) throw DomainError("sentinel scheme: k must be >= 0");
  if (bonus.is_constant()) {
    (void)bonus.constant_value();
  } else {
    (void)bonus.schedule();
  }
}

double agent_payoff_linear(const LinearAccuracyPayment& scheme,
                           const EffortModel& model, double ai_error_prob,
                           double effort) {
  scheme.validate();
  if (!(ai_error_prob > 0.0 && ai_error_prob < 1.0))
    throw DomainError("agent_payoff_linear: p must lie in (0, 1)");
  if (!(effort >= 0.0 && effort <= 1.0))
    throw DomainError("agent_payoff_linear: effort must lie in [0, 1]");
  const double p_output = 1.0 - ai_error_prob + ai_error_prob * model.q(effort);
  return scheme.reward_per_correct * scheme.check_probability * p_output -
         model.cost(effort);
}

double agent_payoff_sentinel(const SentinelScheme& scheme,
                             const EffortModel& model, double x_bonus,
                             double effort) {
  if (!(effort >= 0.0 && effort <= 1.0))
    throw DomainError("agent_payoff_sentinel: effort must lie in [0, 1]");
  if (!(x_bonus >= 0.0))
    throw DomainError("agent_payoff_sentinel: bonus must be >= 0");
  return scheme.rho * model.q(effort) * model.utility(x_bonus) +
         model.utility(scheme.w0) - model.cost(effort);
}

LinearPaymentRequirement required_linear_payment(double e_min, double p,
                                                 const EffortModel& model) {
  if (!(e_min > 0.0 && e_min < 1.0))
    throw DomainError("required_linear_payment: e_min must lie in (0, 1)");
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("required_linear_payment: p must lie in (0, 1)");
  const double qp = model.q_prime(e_min);
  if (!(qp > 0.0) || !std::isfinite(qp))
    throw InfeasibleError("required_linear_payment: q'(e_min) unusable");
  LinearPaymentRequirement out;
  out.reward = model.cost_prime(e_min) / (p * qp);
  out.expected_payment =
      out.reward * (1.0 - p + p * model.q(e_min));
  return out;
}

std::vector<CollapsePoint> collapse_curve(double e_min,
                                          const EffortModel& model,
                                          std::span<const double> p_grid) {
  if (p_grid.empty()) throw DomainError("collapse_curve: empty grid");
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    if (!(p_grid[i] > 0.0))
      throw DomainError("collapse_curve: p grid must be strictly positive");
    if (i > 0 && !(p_grid[i] < p_grid[i - 1]))
      throw DomainError("collapse_curve: p grid must be strictly decreasing");
  }
  std::vector<CollapsePoint> out;
  out.reserve(p_grid.size());
  for (double p : p_grid)
    out.push_back({p, required_linear_payment(e_min, p, model).expected_payment});
  return out;
}

void write_collapse_csv(std::span<const CollapsePoint> series,
                        std::ostream& out) {
  out << "p,required_payment\n";
  out.precision(17);
  for (const auto& pt : series) out << pt.p << ',' << pt.required_payment << '\n';
}

double expected_cost(const SentinelScheme& scheme, std::span<const double> pi,
                     std::span<const double> efforts, const EffortModel& model,
                     CostMode mode) {
  scheme.validate();
  if (pi.size() != efforts.size())
    throw DomainError("expected_cost: pi and efforts lengths differ");
  double total = 0.0;
  double pi_sum = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (!(pi[i] >= 0.0 && pi[i] <= 1.0))
      throw DomainError("expected_cost: pi entries must lie in [0, 1]");
    if (!(efforts[i] >= 0.0 && efforts[i] <= 1.0))
      throw DomainError("expected_cost: efforts must lie in [0, 1]");
    total += (scheme.rho * scheme.bonus.at(i) * model.q(efforts[i]) +
              scheme.w0) *
             pi[i];
    pi_sum += pi[i];
  }
  if (mode == CostMode::eq2)
    total += scheme.rho * scheme.k;
  else
    total += scheme.k * scheme.rho * pi_sum;
  return total;
}

}  // namespace sentinel
