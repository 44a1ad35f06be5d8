// Command-line surface: design construction, single-round simulation,
// estimation, Monte Carlo experiments, and the theory-verification suites.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "sentinel/campaign.hpp"
#include "sentinel/errors.hpp"
#include "sentinel/estimators.hpp"
#include "sentinel/serialize.hpp"
#include "sentinel/simulate.hpp"
#include "sentinel/stats.hpp"
#include "sentinel/verification.hpp"
#include "sentinel/version.hpp"

namespace fs = std::filesystem;
using namespace sentinel;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitVerification = 3;

struct GlobalArgs {
  std::string config_path;
  std::uint64_t seed = 20260801;
  std::string out_dir;
};

ExperimentConfig resolve_config(const GlobalArgs& args) {
  ExperimentConfig config = args.config_path.empty()
                                ? ExperimentConfig::default_config()
                                : load_experiment_config(args.config_path);
  if (!args.out_dir.empty()) config.output_dir = args.out_dir;
  return config;
}

Dataset load_dataset(const std::string& path, const std::string& kind) {
  CsvSchema schema;
  schema.kind = kind == "continuous" ? TaskKind::continuous : TaskKind::binary;
  return ingest_csv_file(path, schema);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
}

TauStrategy tau_from_flag(const std::string& flag) {
  if (flag == "column") return TauStrategy::column;
  if (flag == "binary-calibrated") return TauStrategy::binary_calibrated;
  if (flag == "residual-oracle") return TauStrategy::residual_oracle;
  throw DomainError("unknown tau strategy '" + flag + "'");
}

int cmd_design(const GlobalArgs& args, const std::string& dataset_path,
               const std::string& kind, double budget, double w0, double k,
               std::optional<double> rho, std::optional<double> bonus,
               const std::string& tau_flag, const std::string& out_path) {
  const ExperimentConfig config = resolve_config(args);
  const Dataset dataset = load_dataset(dataset_path, kind);
  DesignProblem problem;
  problem.tau = estimate_tau(dataset, tau_from_flag(tau_flag));
  problem.budget = budget;
  problem.w0 = w0;
  problem.k = k;
  problem.model = config.build_model();
  problem.pinned_rho = rho;
  problem.pinned_bonus = bonus;
  problem.pi_floor = config.pi_floor;
  problem.cost_mode = config.cost_mode;
  const SamplingDesign design = solve_design(problem);
  const std::string json = design_to_json(design);
  if (out_path.empty())
    std::cout << json << '\n';
  else
    write_file(out_path, json);
  return kExitOk;
}

int cmd_simulate(const GlobalArgs& args, const std::string& dataset_path,
                 const std::string& kind, const std::string& design_path,
                 const std::string& out_path) {
  const ExperimentConfig config = resolve_config(args);
  const Dataset dataset = load_dataset(dataset_path, kind);
  std::ifstream in(design_path);
  if (!in) throw DataError("cannot open design '" + design_path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const SamplingDesign design = design_from_json(buf.str());
  const auto outcomes =
      simulate_round(dataset, design, config.build_model(), args.seed);
  std::stringstream csv;
  write_outcomes_csv(outcomes, csv);
  if (out_path.empty())
    std::cout << csv.str();
  else
    write_file(out_path, csv.str());
  return kExitOk;
}

int cmd_estimate(const GlobalArgs& args, const std::string& dataset_path,
                 const std::string& kind, const std::string& design_path,
                 const std::string& outcomes_path, const std::string& method,
                 double alpha, const std::string& out_path) {
  const ExperimentConfig config = resolve_config(args);
  const EffortModel model = config.build_model();
  const Dataset dataset = load_dataset(dataset_path, kind);
  std::ifstream din(design_path);
  if (!din) throw DataError("cannot open design '" + design_path + "'");
  std::stringstream dbuf;
  dbuf << din.rdbuf();
  const std::string design_json = dbuf.str();
  const SamplingDesign design = design_from_json(design_json);
  std::ifstream oin(outcomes_path);
  if (!oin) throw DataError("cannot open outcomes '" + outcomes_path + "'");
  const auto outcomes = read_outcomes_csv(oin);

  MeanEstimate est;
  if (method == "mean") {
    est = estimate_mean(dataset, outcomes, design, model, alpha);
  } else if (method == "active") {
    est = estimate_mean_active_baseline(dataset, outcomes, design.pi,
                                        design.efforts.at(0),
                                        config.baseline.tau_mix, model, alpha);
  } else if (method == "uniform") {
    est = estimate_mean_uniform(dataset, outcomes, design.pi.at(0),
                                design.efforts.at(0), model, alpha);
  } else if (method == "classical") {
    est = estimate_mean_classical(outcomes, design.pi.at(0),
                                  design.efforts.at(0), model, alpha);
  } else {
    throw DomainError("unknown estimate method '" + method + "'");
  }

  const double cost =
      realized_cost(outcomes, design.scheme, design.cost_mode);
  const std::string report =
      estimate_report_json(est, cost, stats::fnv1a_hex(design_json));
  if (out_path.empty())
    std::cout << report << '\n';
  else
    write_file(out_path, report);
  return kExitOk;
}

int cmd_experiment(const GlobalArgs& args) {
  ExperimentConfig config = resolve_config(args);
  if (!args.config_path.empty() && args.seed != 20260801)
    config.base_seed = args.seed;
  const CampaignReport report = run_campaign(config);
  const std::string json = campaign_report_to_json(report);
  if (config.output_dir.empty()) {
    std::cout << json << '\n';
  } else {
    fs::create_directories(config.output_dir);
    const fs::path dir(config.output_dir);
    write_file(dir / "report.json", json);
    std::stringstream widths, coverage, saved;
    write_widths_csv(report, widths);
    write_coverage_csv(report, coverage);
    write_budget_saved_csv(report, saved);
    write_file(dir / "widths.csv", widths.str());
    write_file(dir / "coverage.csv", coverage.str());
    write_file(dir / "budget_saved.csv", saved.str());
    std::cout << "campaign report written to " << config.output_dir << '\n';
  }
  for (const auto& cell : report.cells)
    if (!cell.ok())
      std::cerr << "cell error [" << method_name(cell.method) << " @ "
                << cell.budget << "]: " << cell.error << '\n';
  return kExitOk;
}

int cmd_verify(const GlobalArgs& args, bool quick) {
  VerifyOptions options = quick ? VerifyOptions::quick() : VerifyOptions();
  options.seed = args.seed;
  const auto results = verify_theory(options);
  for (const auto& r : results)
    std::printf("[%s] %-24s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.c_str());
  if (!args.out_dir.empty()) {
    fs::create_directories(args.out_dir);
    for (double e_min : {0.3, 0.5, 0.8}) {
      const auto curve = default_collapse_curve(e_min);
      std::stringstream csv;
      write_collapse_csv(curve, csv);
      char name[64];
      std::snprintf(name, sizeof(name), "collapse_e%02d.csv",
                    static_cast<int>(e_min * 100));
      write_file(fs::path(args.out_dir) / name, csv.str());
    }
  }
  return all_pass(results) ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentinel-auditing incentives and incentive-aware active "
               "statistical inference"};
  app.set_version_flag("--version", std::string(kVersion));
  app.fallthrough();
  GlobalArgs global;
  app.add_option("--config", global.config_path, "experiment config (JSON)");
  app.add_option("--seed", global.seed, "base seed");
  app.add_option("--out", global.out_dir, "output directory");

  // design
  auto* design = app.add_subcommand("design", "emit a sampling design JSON");
  std::string d_dataset, d_kind = "binary", d_tau = "binary-calibrated",
              d_out;
  double d_budget = 1.0, d_w0 = 0.25, d_k = 0.5;
  std::optional<double> d_rho, d_bonus;
  design->add_option("--dataset", d_dataset, "dataset CSV")->required();
  design->add_option("--kind", d_kind, "binary|continuous");
  design->add_option("--budget", d_budget, "expected-cost budget")->required();
  design->add_option("--w0", d_w0, "per-sample overhead payment");
  design->add_option("--k", d_k, "sentinel operating cost");
  design->add_option("--rho", d_rho, "pin the audit rate");
  design->add_option("--bonus", d_bonus, "pin the constant bonus");
  design->add_option("--tau", d_tau,
                     "column|binary-calibrated|residual-oracle");
  design->add_option("--design-out", d_out, "output path (default stdout)");

  // simulate
  auto* simulate = app.add_subcommand("simulate",
                                      "run one labeling round, emit outcomes");
  std::string s_dataset, s_kind = "binary", s_design, s_out;
  simulate->add_option("--dataset", s_dataset, "dataset CSV")->required();
  simulate->add_option("--kind", s_kind, "binary|continuous");
  simulate->add_option("--design", s_design, "design JSON")->required();
  simulate->add_option("--outcomes-out", s_out, "output path (default stdout)");

  // estimate
  auto* estimate = app.add_subcommand("estimate",
                                      "turn outcomes into an estimate report");
  std::string e_dataset, e_kind = "binary", e_design, e_outcomes,
              e_method = "mean", e_out;
  double e_alpha = 0.05;
  estimate->add_option("--dataset", e_dataset, "dataset CSV")->required();
  estimate->add_option("--kind", e_kind, "binary|continuous");
  estimate->add_option("--design", e_design, "design JSON")->required();
  estimate->add_option("--outcomes", e_outcomes, "outcomes CSV")->required();
  estimate->add_option("--method", e_method,
                       "mean|active|uniform|classical");
  estimate->add_option("--alpha", e_alpha, "confidence level");
  estimate->add_option("--report-out", e_out, "output path (default stdout)");

  // experiment
  app.add_subcommand("experiment", "run the Monte Carlo campaign");

  // verify-theory
  auto* verify = app.add_subcommand("verify-theory",
                                    "run the invariant suites");
  bool v_quick = false;
  verify->add_flag("--quick", v_quick, "reduced Monte Carlo scales");

  app.require_subcommand(1);
  CLI11_PARSE(app, argc, argv);

  try {
    if (design->parsed())
      return cmd_design(global, d_dataset, d_kind, d_budget, d_w0, d_k, d_rho,
                        d_bonus, d_tau, d_out);
    if (simulate->parsed())
      return cmd_simulate(global, s_dataset, s_kind, s_design, s_out);
    if (estimate->parsed())
      return cmd_estimate(global, e_dataset, e_kind, e_design, e_outcomes,
                          e_method, e_alpha, e_out);
    if (app.get_subcommand("experiment")->parsed())
      return cmd_experiment(global);
    if (verify->parsed()) return cmd_verify(global, v_quick);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
