#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sentinel/dataset.hpp"
#include "sentinel/design.hpp"
#include "sentinel/effort_model.hpp"

namespace sentinel {

enum class Method { ours, active, uniform, classical };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

/// Settings for the no-sentinel comparison methods: pinned effort, the
/// active/uniform mixing weight, and an optional fixed uniform probability
/// that overrides the budget-derived one.
struct BaselineSettings {
  std::optional<double> pi_unif;
  double effort = 0.8;
  double tau_mix = 0.5;
  bool tune_tau_mix = false;  // pick tau_mix on a pilot split instead
};

struct ExperimentConfig {
  // Dataset source: synthetic generator, or a CSV file when csv_path is set.
  SyntheticConfig synthetic;
  std::string csv_path;
  CsvSchema csv_schema;

  std::vector<Method> methods = {Method::ours, Method::active, Method::uniform,
                                 Method::classical};
  std::vector<double> budgets;
  double alpha = 0.05;
  std::size_t replications = 2000;
  std::uint64_t base_seed = 20260801;

  // Sentinel cost parameters and the pinned audit rate of the default design.
  double w0 = 0.25;
  double k = 0.5;
  double rho = 0.1;
  CostMode cost_mode = CostMode::eq2;

  CorrectionFamily q_family;
  EffortCostFamily c_family;
  PaymentUtility mu_family;
  double w_max = 100.0;

  BaselineSettings baseline;
  TauStrategy tau_strategy = TauStrategy::binary_calibrated;
  double pi_floor = 0.005;

  int threads = 0;  // 0 = hardware concurrency, capped at 8
  std::string output_dir;

  void validate() const;
  EffortModel build_model() const;

  /// Default synthetic campaign: binary Beta(1/2, 1/2) scores, n = 20000,
  /// five budgets spanning the regime where sentinel auditing dominates.
  static ExperimentConfig default_config();
};

struct CampaignCell {
  Method method = Method::ours;
  double budget = 0.0;
  std::size_t replications_ok = 0;
  double mean_width = 0.0;
  double se_width = 0.0;
  double coverage = 0.0;
  double mean_cost = 0.0;
  std::string error;  // empty when the cell succeeded

  bool ok() const { return error.empty(); }
};

struct BudgetSavedRow {
  Method baseline = Method::uniform;
  double target_width = 0.0;
  double budget_ours = 0.0;
  double budget_baseline = 0.0;
  double savings = 0.0;  // 1 - budget_ours / budget_baseline
};

struct CampaignReport {
  std::string version;
  std::string config_digest;
  std::uint64_t base_seed = 0;
  double theta_star = 0.0;
  std::vector<double> budgets;
  std::vector<Method> methods;
  std::vector<CampaignCell> cells;  // budget-major, then method order
  std::vector<BudgetSavedRow> budget_saved;

  const CampaignCell& cell(Method m, double budget) const;
};

/// Runs the full Monte Carlo comparison: for every budget and method, builds
/// the design, simulates replications seeded base + r, estimates, and
/// aggregates widths, coverage and realized cost. Per-cell failures are
/// recorded and do not abort the campaign. Deterministic given the config.
CampaignReport run_campaign(const ExperimentConfig& config);

struct SavingsResult {
  double budget_ours = 0.0;
  double budget_baseline = 0.0;
  double savings = 0.0;
};

/// Minimal budgets at which our method and a baseline reach target_width,
/// by isotonic-then-linear interpolation of the width curves; throws
/// DomainError when the target is not bracketed by either curve.
SavingsResult budget_saved(const CampaignReport& report, Method baseline,
                           double target_width);

/// One row per baseline at an automatically chosen common target width;
/// baselines whose curve never overlaps ours are skipped.
std::vector<BudgetSavedRow> budget_saved_table(const CampaignReport& report);

/// Flat per-label price charged to the no-sentinel baselines: overhead plus
/// the linear-accuracy payment that sustains the pinned effort at the
/// population mean AI error rate.
double baseline_label_cost(const Dataset& dataset, const EffortModel& model,
                           double effort, double w0);

}  // namespace sentinel
