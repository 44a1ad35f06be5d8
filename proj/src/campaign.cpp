#include "sentinel/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "sentinel/errors.hpp"
#include "sentinel/estimators.hpp"
#include "sentinel/payment.hpp"
#include "sentinel/rng.hpp"
#include "sentinel/serialize.hpp"
#include "sentinel/simulate.hpp"
#include "sentinel/stats.hpp"
#include "sentinel/version.hpp"

namespace sentinel {

std::string method_name(Method m) {
  switch (m) {
    case Method::ours:
      return "ours";
    case Method::active:
      return "active";
    case Method::uniform:
      return "uniform";
    case Method::classical:
      return "classical";
  }
  return "ours";
}

Method method_from_name(const std::string& name) {
  if (name == "ours") return Method::ours;
  if (name == "active") return Method::active;
  if (name == "uniform") return Method::uniform;
  if (name == "classical") return Method::classical;
  throw DataError("unknown method '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (replications < 1)
    throw DomainError("experiment config: replications must be >= 1");
  if (budgets.empty())
    throw DomainError("experiment config: at least one budget required");
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    if (!(budgets[i] > 0.0))
      throw DomainError("experiment config: budgets must be positive");
    if (i > 0 && !(budgets[i] > budgets[i - 1]))
      throw DomainError("experiment config: budgets must be strictly "
                        "increasing");
  }
  if (methods.empty())
    throw DomainError("experiment config: at least one method required");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("experiment config: alpha must lie in (0, 1)");
  if (!(rho > 0.0 && rho < 1.0))
    throw DomainError("experiment config: rho must lie in (0, 1)");
  if (!(baseline.effort > 0.0 && baseline.effort <= 1.0))
    throw DomainError("experiment config: baseline effort must lie in (0, 1]");
  if (!(baseline.tau_mix >= 0.0 && baseline.tau_mix <= 1.0))
    throw DomainError("experiment config: tau_mix must lie in [0, 1]");
  if (baseline.pi_unif && !(*baseline.pi_unif > 0.0 && *baseline.pi_unif <= 1.0))
    throw DomainError("experiment config: pi_unif must lie in (0, 1]");
  if (csv_path.empty()) synthetic.validate();
  (void)build_model();
}

EffortModel ExperimentConfig::build_model() const {
  return EffortModel(q_family, c_family, mu_family, w_max);
}

ExperimentConfig ExperimentConfig::default_config() {
  ExperimentConfig c;
  c.synthetic.kind = TaskKind::binary;
  c.synthetic.n = 20000;
  c.synthetic.beta_a = 0.5;
  c.synthetic.beta_b = 0.5;
  c.budgets = {400.0, 1200.0, 3600.0, 7600.0, 12000.0};
  return c;
}

double baseline_label_cost(const Dataset& dataset, const EffortModel& model,
                           double effort, double w0) {
  if (dataset.instances.empty())
    throw DataError("baseline_label_cost: empty dataset");
  double p_sum = 0.0;
  for (const auto& inst : dataset.instances) {
    if (dataset.kind == TaskKind::binary) {
      // Expected error probability knowable from the score alone.
      p_sum += 2.0 * inst.prediction * (1.0 - inst.prediction);
    } else {
      p_sum += inst.ai_error_prob;
    }
  }
  const double p_pop = p_sum / static_cast<double>(dataset.size());
  if (!(p_pop > 1e-9))
    throw InfeasibleError("baseline_label_cost: AI error rate is zero; no "
                          "finite accuracy-based payment sustains effort");
  return w0 + required_linear_payment(effort, p_pop, model).expected_payment;
}

namespace {

struct RepCell {
  bool ok = false;
  double width = 0.0;
  bool covered = false;
  double cost = 0.0;
  std::string error;
};

// Per-replication evaluation of every (budget, method) cell on one dataset.
class RoundRunner {
 public:
  RoundRunner(const ExperimentConfig& config, const EffortModel& model,
              double theta_star)
      : config_(config), model_(model), theta_star_(theta_star) {}

  std::vector<RepCell> run(const Dataset& dataset, std::uint64_t rep_seed) const {
    const std::size_t n = dataset.size();
    const auto tau = estimate_tau(dataset, config_.tau_strategy);
    const double label_cost = baseline_label_cost(
        dataset, model_, config_.baseline.effort, config_.w0);
    std::vector<double> sqrt_tau(n), unit_costs(n, label_cost);
    for (std::size_t i = 0; i < n; ++i) sqrt_tau[i] = std::sqrt(tau[i]);

    std::vector<RepCell> cells(config_.budgets.size() *
                               config_.methods.size());
    for (std::size_t bi = 0; bi < config_.budgets.size(); ++bi) {
      const double budget = config_.budgets[bi];
      for (std::size_t mi = 0; mi < config_.methods.size(); ++mi) {
        RepCell& cell = cells[bi * config_.methods.size() + mi];
        const std::uint64_t cell_seed = derive_seed(rep_seed, bi + 1, mi + 1);
        try {
          cell = run_cell(dataset, tau, sqrt_tau, unit_costs, label_cost,
                          budget, config_.methods[mi], cell_seed);
        } catch (const std::exception& e) {
          cell.ok = false;
          cell.error = e.what();
        }
      }
    }
    return cells;
  }

 private:
  RepCell run_cell(const Dataset& dataset, const std::vector<double>& tau,
                   const std::vector<double>& sqrt_tau,
                   const std::vector<double>& unit_costs, double label_cost,
                   double budget, Method method, std::uint64_t seed) const {
    RepCell cell;
    MeanEstimate est;
    double cost = 0.0;
    if (method == Method::ours) {
      DesignProblem problem;
      problem.tau = tau;
      problem.budget = budget;
      problem.w0 = config_.w0;
      problem.k = config_.k;
      problem.model = model_;
      problem.cost_mode = config_.cost_mode;
      problem.pi_floor = config_.pi_floor;
      const SamplingDesign design = design_fixed_rho(problem, config_.rho);
      const auto outcomes = simulate_round(dataset, design, model_, seed);
      est = estimate_mean(dataset, outcomes, design, model_, config_.alpha);
      cost = realized_cost(outcomes, design.scheme, config_.cost_mode);
    } else {
      const std::size_t n = dataset.size();
      const double effort = config_.baseline.effort;
      const double pi_unif =
          config_.baseline.pi_unif
              ? *config_.baseline.pi_unif
              : std::min(1.0, budget / (static_cast<double>(n) * label_cost));
      std::vector<double> pi;
      double tau_mix = config_.baseline.tau_mix;
      if (method == Method::active) {
        if (config_.baseline.tune_tau_mix)
          tau_mix = tune_tau_mix(tau, sqrt_tau, unit_costs, budget, pi_unif);
        pi = mixed_active_pi(sqrt_tau, unit_costs, budget, pi_unif, tau_mix);
      } else {
        pi.assign(n, pi_unif);
      }

      SamplingDesign design;
      design.pi = pi;
      design.scheme = SentinelScheme{0.0, BonusSchedule(0.0), 0.0, 0.0};
      design.efforts.assign(n, effort);
      const auto outcomes = simulate_round(dataset, design, model_, seed);

      switch (method) {
        case Method::active:
          est = estimate_mean_active_baseline(dataset, outcomes, pi, effort,
                                              tau_mix, model_, config_.alpha);
          break;
        case Method::uniform:
          est = estimate_mean_uniform(dataset, outcomes, pi_unif, effort,
                                      model_, config_.alpha);
          break;
        case Method::classical:
          est = estimate_mean_classical(outcomes, pi_unif, effort, model_,
                                        config_.alpha);
          break;
        default:
          break;
      }
      std::size_t sampled = 0;
      for (const auto& o : outcomes) sampled += o.sampled ? 1 : 0;
      cost = static_cast<double>(sampled) * label_cost;
    }
    cell.ok = true;
    cell.width = est.ci_high - est.ci_low;
    cell.covered = est.ci_low <= theta_star_ && theta_star_ <= est.ci_high;
    cell.cost = cost;
    return cell;
  }

  std::vector<double> mixed_active_pi(const std::vector<double>& sqrt_tau,
                                      const std::vector<double>& unit_costs,
                                      double budget, double pi_unif,
                                      double tau_mix) const {
    const auto pi_active = proportional_allocation(sqrt_tau, unit_costs,
                                                   budget, config_.pi_floor);
    std::vector<double> pi(pi_active.size());
    for (std::size_t i = 0; i < pi.size(); ++i)
      pi[i] = std::min(1.0, (1.0 - tau_mix) * pi_active[i] + tau_mix * pi_unif);
    return pi;
  }

  // Pick the mixing weight minimizing the plug-in variance surrogate on the
  // first half of the instances.
  double tune_tau_mix(const std::vector<double>& tau,
                      const std::vector<double>& sqrt_tau,
                      const std::vector<double>& unit_costs, double budget,
                      double pi_unif) const {
    const double q = model_.q(config_.baseline.effort);
    double best_mix = 0.0;
    double best_proxy = std::numeric_limits<double>::infinity();
    const std::size_t pilot = (tau.size() + 1) / 2;
    for (int step = 0; step <= 10; ++step) {
      const double mix = step / 10.0;
      const auto pi = mixed_active_pi(sqrt_tau, unit_costs, budget, pi_unif,
                                      mix);
      double proxy = 0.0;
      for (std::size_t i = 0; i < pilot; ++i) {
        if (tau[i] == 0.0) continue;
        proxy += tau[i] / (pi[i] * q);
      }
      if (proxy < best_proxy) {
        best_proxy = proxy;
        best_mix = mix;
      }
    }
    return best_mix;
  }

  const ExperimentConfig& config_;
  const EffortModel& model_;
  double theta_star_;
};

double width_se(const std::vector<double>& widths) {
  const auto mv = stats::mean_variance(widths);
  if (mv.n < 2) return 0.0;
  return std::sqrt(mv.variance / static_cast<double>(mv.n));
}

}  // namespace

const CampaignCell& CampaignReport::cell(Method m, double budget) const {
  for (const auto& c : cells)
    if (c.method == m && c.budget == budget) return c;
  throw DomainError("campaign report: no cell for " + method_name(m) +
                    " at budget " + std::to_string(budget));
}

CampaignReport run_campaign(const ExperimentConfig& config) {
  config.validate();
  const EffortModel model = config.build_model();

  Dataset csv_dataset;
  double theta_star = 0.0;
  if (!config.csv_path.empty()) {
    csv_dataset = ingest_csv_file(config.csv_path, config.csv_schema);
    double sum = 0.0;
    for (const auto& inst : csv_dataset.instances) sum += inst.y_true;
    theta_star = sum / static_cast<double>(csv_dataset.size());
  } else {
    theta_star = synthetic_population_mean(config.synthetic);
  }

  const RoundRunner runner(config, model, theta_star);
  const std::size_t reps = config.replications;
  std::vector<std::vector<RepCell>> results(reps);

  int threads = config.threads;
  if (threads <= 0)
    threads = std::min(8u, std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= reps) return;
      const std::uint64_t rep_seed = config.base_seed + r;
      if (config.csv_path.empty()) {
        const Dataset dataset =
            generate_synthetic(config.synthetic, rep_seed);
        results[r] = runner.run(dataset, rep_seed);
      } else {
        results[r] = runner.run(csv_dataset, rep_seed);
      }
    }
  };
  if (threads == 1 || reps == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  CampaignReport report;
  report.version = std::string(kVersion);
  report.base_seed = config.base_seed;
  report.theta_star = theta_star;
  report.budgets = config.budgets;
  report.methods = config.methods;
  {
    ExperimentConfig canonical = config;
    canonical.output_dir.clear();
    canonical.threads = 0;
    report.config_digest =
        stats::fnv1a_hex(experiment_config_to_json(canonical));
  }

  for (std::size_t bi = 0; bi < config.budgets.size(); ++bi) {
    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
      CampaignCell cell;
      cell.method = config.methods[mi];
      cell.budget = config.budgets[bi];
      std::vector<double> widths, costs;
      std::size_t covered = 0;
      std::string first_error;
      for (std::size_t r = 0; r < reps; ++r) {
        const RepCell& rc = results[r][bi * config.methods.size() + mi];
        if (!rc.ok) {
          if (first_error.empty()) first_error = rc.error;
          continue;
        }
        widths.push_back(rc.width);
        costs.push_back(rc.cost);
        covered += rc.covered ? 1 : 0;
      }
      cell.replications_ok = widths.size();
      if (widths.empty()) {
        cell.error = first_error.empty() ? "no successful replication"
                                         : first_error;
      } else {
        cell.mean_width = stats::mean_variance(widths).mean;
        cell.se_width = width_se(widths);
        cell.coverage =
            static_cast<double>(covered) / static_cast<double>(widths.size());
        cell.mean_cost = stats::mean_variance(costs).mean;
        if (!first_error.empty()) cell.error = "";  // partial failures ignored
      }
      report.cells.push_back(std::move(cell));
    }
  }

  report.budget_saved = budget_saved_table(report);
  return report;
}

namespace {

struct Curve {
  std::vector<double> budgets;
  std::vector<double> widths;  // isotonic nonincreasing fit
};

Curve method_curve(const CampaignReport& report, Method m) {
  Curve curve;
  for (const auto& cell : report.cells) {
    if (cell.method != m || !cell.ok()) continue;
    curve.budgets.push_back(cell.budget);
    curve.widths.push_back(cell.mean_width);
  }
  if (curve.budgets.size() < 2)
    throw DomainError("budget_saved: method " + method_name(m) +
                      " has fewer than two usable cells");
  curve.widths = stats::isotonic_nonincreasing(curve.widths);
  return curve;
}

// Minimal budget at which the fitted width curve reaches the target.
double budget_reaching(const Curve& curve, double target,
                       const std::string& what) {
  if (target > curve.widths.front() || target < curve.widths.back())
    throw DomainError("budget_saved: target width " + std::to_string(target) +
                      " is not bracketed by the " + what + " curve");
  for (std::size_t j = 0; j < curve.widths.size(); ++j) {
    if (curve.widths[j] <= target) {
      if (j == 0) return curve.budgets[0];
      const double w0 = curve.widths[j - 1];
      const double w1 = curve.widths[j];
      if (w0 == w1) return curve.budgets[j - 1];
      const double frac = (w0 - target) / (w0 - w1);
      return curve.budgets[j - 1] +
             frac * (curve.budgets[j] - curve.budgets[j - 1]);
    }
  }
  return curve.budgets.back();
}

}  // namespace

SavingsResult budget_saved(const CampaignReport& report, Method baseline,
                           double target_width) {
  if (baseline == Method::ours)
    throw DomainError("budget_saved: baseline must differ from ours");
  const Curve ours = method_curve(report, Method::ours);
  const Curve base = method_curve(report, baseline);
  SavingsResult out;
  out.budget_ours = budget_reaching(ours, target_width, "ours");
  out.budget_baseline =
      budget_reaching(base, target_width, method_name(baseline));
  out.savings = 1.0 - out.budget_ours / out.budget_baseline;
  return out;
}

std::vector<BudgetSavedRow> budget_saved_table(const CampaignReport& report) {
  std::vector<BudgetSavedRow> rows;
  Curve ours;
  try {
    ours = method_curve(report, Method::ours);
  } catch (const std::exception&) {
    return rows;
  }
  for (Method m : report.methods) {
    if (m == Method::ours) continue;
    try {
      const Curve base = method_curve(report, m);
      const double lo = std::max(ours.widths.back(), base.widths.back());
      const double hi = std::min(ours.widths.front(), base.widths.front());
      if (!(lo < hi)) continue;  // curves never overlap
      const double target = std::sqrt(lo * hi);
      const SavingsResult res = budget_saved(report, m, target);
      rows.push_back({m, target, res.budget_ours, res.budget_baseline,
                      res.savings});
    } catch (const std::exception&) {
      continue;  // skipped baselines simply do not appear in the table
    }
  }
  return rows;
}

}  // namespace sentinel
