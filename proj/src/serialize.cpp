#include "sentinel/serialize.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "sentinel/errors.hpp"
#include "sentinel/version.hpp"

namespace sentinel {

using nlohmann::json;

namespace {

std::string cost_mode_name(CostMode mode) {
  return mode == CostMode::eq2 ? "eq2" : "per-sentinel";
}

CostMode cost_mode_from_name(const std::string& name) {
  if (name == "eq2") return CostMode::eq2;
  if (name == "per-sentinel") return CostMode::per_sentinel;
  throw DataError("unknown cost mode '" + name + "'");
}

std::string tau_strategy_name(TauStrategy s) {
  switch (s) {
    case TauStrategy::column:
      return "column";
    case TauStrategy::binary_calibrated:
      return "binary-calibrated";
    case TauStrategy::residual_oracle:
      return "residual-oracle";
  }
  return "column";
}

TauStrategy tau_strategy_from_name(const std::string& name) {
  if (name == "column") return TauStrategy::column;
  if (name == "binary-calibrated") return TauStrategy::binary_calibrated;
  if (name == "residual-oracle") return TauStrategy::residual_oracle;
  throw DataError("unknown tau strategy '" + name + "'");
}

}  // namespace

std::string design_to_json(const SamplingDesign& design) {
  json j;
  j["rho"] = design.scheme.rho;
  if (design.scheme.bonus.is_constant())
    j["bonus"] = {{"constant", design.scheme.bonus.constant_value()}};
  else
    j["bonus"] = {{"schedule", design.scheme.bonus.schedule()}};
  j["w0"] = design.scheme.w0;
  j["k"] = design.scheme.k;
  j["pi"] = design.pi;
  j["efforts"] = design.efforts;
  j["objective"] = design.objective_value;
  j["expected_cost"] = design.expected_cost_value;
  j["cost_mode"] = cost_mode_name(design.cost_mode);
  return j.dump(2);
}

SamplingDesign design_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("design json: ") + e.what());
  }
  SamplingDesign design;
  try {
    const auto& jb = j.at("bonus");
    if (jb.contains("constant"))
      design.scheme.bonus = BonusSchedule(jb.at("constant").get<double>());
    else
      design.scheme.bonus =
          BonusSchedule::per_instance(jb.at("schedule").get<std::vector<double>>());
    design.scheme.rho = j.at("rho").get<double>();
    design.scheme.w0 = j.at("w0").get<double>();
    design.scheme.k = j.at("k").get<double>();
    design.pi = j.at("pi").get<std::vector<double>>();
    design.efforts = j.at("efforts").get<std::vector<double>>();
    design.objective_value = j.value("objective", 0.0);
    design.expected_cost_value = j.value("expected_cost", 0.0);
    design.cost_mode = cost_mode_from_name(j.value("cost_mode", "eq2"));
  } catch (const json::exception& e) {
    throw DataError(std::string("design json: ") + e.what());
  }
  design.scheme.validate();
  return design;
}

std::string estimate_report_json(const MeanEstimate& estimate,
                                 double realized_cost,
                                 const std::string& design_digest) {
  json j;
  j["method"] = estimate.method;
  j["point"] = estimate.point;
  j["variance"] = estimate.variance;
  j["ci"] = {estimate.ci_low, estimate.ci_high};
  j["alpha"] = estimate.alpha;
  j["n"] = estimate.n;
  j["realized_cost"] = realized_cost;
  j["design_digest"] = design_digest;
  return j.dump(2);
}

namespace {

json synthetic_to_json(const SyntheticConfig& c) {
  json j;
  j["kind"] = c.kind == TaskKind::binary ? "binary" : "continuous";
  j["n"] = c.n;
  j["score_model"] =
      c.score_model == SyntheticConfig::ScoreModel::beta ? "beta" : "logistic";
  j["beta_a"] = c.beta_a;
  j["beta_b"] = c.beta_b;
  j["logit_intercept"] = c.logit_intercept;
  j["logit_slope"] = c.logit_slope;
  j["miscal_exponent"] = c.miscal_exponent;
  j["pred_scale"] = c.pred_scale;
  j["sigma_lo"] = c.sigma_lo;
  j["sigma_hi"] = c.sigma_hi;
  j["error_prob_lo"] = c.error_prob_lo;
  j["error_prob_hi"] = c.error_prob_hi;
  return j;
}

SyntheticConfig synthetic_from_json(const json& j) {
  SyntheticConfig c;
  const std::string kind = j.value("kind", "binary");
  if (kind == "binary")
    c.kind = TaskKind::binary;
  else if (kind == "continuous")
    c.kind = TaskKind::continuous;
  else
    throw DataError("synthetic config: unknown kind '" + kind + "'");
  c.n = j.value("n", c.n);
  const std::string sm = j.value("score_model", "beta");
  if (sm == "beta")
    c.score_model = SyntheticConfig::ScoreModel::beta;
  else if (sm == "logistic")
    c.score_model = SyntheticConfig::ScoreModel::logistic;
  else
    throw DataError("synthetic config: unknown score model '" + sm + "'");
  c.beta_a = j.value("beta_a", c.beta_a);
  c.beta_b = j.value("beta_b", c.beta_b);
  c.logit_intercept = j.value("logit_intercept", c.logit_intercept);
  c.logit_slope = j.value("logit_slope", c.logit_slope);
  c.miscal_exponent = j.value("miscal_exponent", c.miscal_exponent);
  c.pred_scale = j.value("pred_scale", c.pred_scale);
  c.sigma_lo = j.value("sigma_lo", c.sigma_lo);
  c.sigma_hi = j.value("sigma_hi", c.sigma_hi);
  c.error_prob_lo = j.value("error_prob_lo", c.error_prob_lo);
  c.error_prob_hi = j.value("error_prob_hi", c.error_prob_hi);
  return c;
}

json effort_model_to_json(const ExperimentConfig& c) {
  json j;
  j["q"] = {{"family", "power"}, {"exponent", c.q_family.exponent}};
  j["c"] = {{"family", "power"},
            {"exponent", c.c_family.exponent},
            {"scale", c.c_family.scale}};
  j["mu"] = {{"family", c.mu_family.name()}, {"gamma", c.mu_family.gamma}};
  j["w_max"] = c.w_max;
  return j;
}

void effort_model_from_json(const json& j, ExperimentConfig& c) {
  if (j.contains("q"))
    c.q_family.exponent = j.at("q").value("exponent", c.q_family.exponent);
  if (j.contains("c")) {
    c.c_family.exponent = j.at("c").value("exponent", c.c_family.exponent);
    c.c_family.scale = j.at("c").value("scale", c.c_family.scale);
  }
  if (j.contains("mu")) {
    const std::string fam = j.at("mu").value("family", "identity");
    if (fam == "identity")
      c.mu_family.kind = PaymentUtility::Kind::identity;
    else if (fam == "power")
      c.mu_family.kind = PaymentUtility::Kind::power;
    else if (fam == "shifted-log")
      c.mu_family.kind = PaymentUtility::Kind::shifted_log;
    else
      throw DataError("effort model: unknown utility family '" + fam + "'");
    c.mu_family.gamma = j.at("mu").value("gamma", c.mu_family.gamma);
  }
  c.w_max = j.value("w_max", c.w_max);
}

}  // namespace

std::string experiment_config_to_json(const ExperimentConfig& c) {
  json j;
  if (c.csv_path.empty())
    j["dataset"] = {{"synthetic", synthetic_to_json(c.synthetic)}};
  else
    j["dataset"] = {{"csv", c.csv_path},
                    {"kind", c.csv_schema.kind == TaskKind::binary
                                 ? "binary"
                                 : "continuous"}};
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(method_name(m));
  j["methods"] = methods;
  j["budgets"] = c.budgets;
  j["alpha"] = c.alpha;
  j["replications"] = c.replications;
  j["seed"] = c.base_seed;
  j["costs"] = {{"w0", c.w0}, {"k", c.k}, {"rho", c.rho},
                {"mode", cost_mode_name(c.cost_mode)}};
  j["effort_model"] = effort_model_to_json(c);
  j["baseline"] = {{"effort", c.baseline.effort},
                   {"tau_mix", c.baseline.tau_mix},
                   {"tune_tau_mix", c.baseline.tune_tau_mix}};
  if (c.baseline.pi_unif) j["baseline"]["pi_unif"] = *c.baseline.pi_unif;
  j["tau_strategy"] = tau_strategy_name(c.tau_strategy);
  j["pi_floor"] = c.pi_floor;
  j["threads"] = c.threads;
  j["output_dir"] = c.output_dir;
  return j.dump(2);
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("experiment config: ") + e.what());
  }
  ExperimentConfig c = ExperimentConfig::default_config();
  try {
    if (j.contains("dataset")) {
      const auto& jd = j.at("dataset");
      if (jd.contains("synthetic")) {
        c.synthetic = synthetic_from_json(jd.at("synthetic"));
        c.csv_path.clear();
      } else if (jd.contains("csv")) {
        c.csv_path = jd.at("csv").get<std::string>();
        c.csv_schema.kind = jd.value("kind", "binary") == std::string("binary")
                                ? TaskKind::binary
                                : TaskKind::continuous;
      }
    }
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j.at("methods"))
        c.methods.push_back(method_from_name(m.get<std::string>()));
    }
    if (j.contains("budgets"))
      c.budgets = j.at("budgets").get<std::vector<double>>();
    c.alpha = j.value("alpha", c.alpha);
    c.replications = j.value("replications", c.replications);
    c.base_seed = j.value("seed", c.base_seed);
    if (j.contains("costs")) {
      const auto& jc = j.at("costs");
      c.w0 = jc.value("w0", c.w0);
      c.k = jc.value("k", c.k);
      c.rho = jc.value("rho", c.rho);
      c.cost_mode = cost_mode_from_name(jc.value("mode", "eq2"));
    }
    if (j.contains("effort_model"))
      effort_model_from_json(j.at("effort_model"), c);
    if (j.contains("baseline")) {
      const auto& jb = j.at("baseline");
      c.baseline.effort = jb.value("effort", c.baseline.effort);
      c.baseline.tau_mix = jb.value("tau_mix", c.baseline.tau_mix);
      c.baseline.tune_tau_mix =
          jb.value("tune_tau_mix", c.baseline.tune_tau_mix);
      if (jb.contains("pi_unif"))
        c.baseline.pi_unif = jb.at("pi_unif").get<double>();
    }
    if (j.contains("tau_strategy"))
      c.tau_strategy =
          tau_strategy_from_name(j.at("tau_strategy").get<std::string>());
    c.pi_floor = j.value("pi_floor", c.pi_floor);
    c.threads = j.value("threads", c.threads);
    c.output_dir = j.value("output_dir", c.output_dir);
  } catch (const json::exception& e) {
    throw DataError(std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return experiment_config_from_json(buf.str());
}

std::string campaign_report_to_json(const CampaignReport& report) {
  json j;
  j["version"] = report.version;
  j["config_digest"] = report.config_digest;
  j["base_seed"] = report.base_seed;
  j["theta_star"] = report.theta_star;
  j["budgets"] = report.budgets;
  json methods = json::array();
  for (Method m : report.methods) methods.push_back(method_name(m));
  j["methods"] = methods;
  json cells = json::array();
  for (const auto& cell : report.cells) {
    json jc;
    jc["method"] = method_name(cell.method);
    jc["budget"] = cell.budget;
    if (cell.ok()) {
      jc["replications_ok"] = cell.replications_ok;
      jc["mean_width"] = cell.mean_width;
      jc["se_width"] = cell.se_width;
      jc["coverage"] = cell.coverage;
      jc["mean_cost"] = cell.mean_cost;
    } else {
      jc["error"] = cell.error;
    }
    cells.push_back(jc);
  }
  j["cells"] = cells;
  json saved = json::array();
  for (const auto& row : report.budget_saved) {
    saved.push_back({{"baseline", method_name(row.baseline)},
                     {"target_width", row.target_width},
                     {"budget_ours", row.budget_ours},
                     {"budget_baseline", row.budget_baseline},
                     {"savings", row.savings}});
  }
  j["budget_saved"] = saved;
  return j.dump(2);
}

void write_widths_csv(const CampaignReport& report, std::ostream& out) {
  out << "budget,method,mean_width,se_width\n";
  out.precision(17);
  for (const auto& cell : report.cells) {
    out << cell.budget << ',' << method_name(cell.method) << ',';
    if (cell.ok())
      out << cell.mean_width << ',' << cell.se_width << '\n';
    else
      out << ",\n";
  }
}

void write_coverage_csv(const CampaignReport& report, std::ostream& out) {
  out << "budget,method,coverage\n";
  out.precision(17);
  for (const auto& cell : report.cells) {
    out << cell.budget << ',' << method_name(cell.method) << ',';
    if (cell.ok())
      out << cell.coverage << '\n';
    else
      out << '\n';
  }
}

void write_budget_saved_csv(const CampaignReport& report, std::ostream& out) {
  out << "target_width,baseline,budget_ours,budget_baseline,savings\n";
  out.precision(17);
  for (const auto& row : report.budget_saved) {
    out << row.target_width << ',' << method_name(row.baseline) << ','
        << row.budget_ours << ',' << row.budget_baseline << ',' << row.savings
        << '\n';
  }
}

void write_outcomes_csv(const std::vector<LabelOutcome>& outcomes,
                        std::ostream& out) {
  out << "id,sampled,regular,label,bonus_paid,base_paid,effort\n";
  out.precision(17);
  for (const auto& o : outcomes) {
    out << o.id << ',' << (o.sampled ? 1 : 0) << ',' << (o.regular ? 1 : 0)
        << ',';
    if (o.label) out << *o.label;
    out << ',' << o.bonus_paid << ',' << o.base_paid << ',' << o.effort
        << '\n';
  }
}

std::vector<LabelOutcome> read_outcomes_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  std::vector<LabelOutcome> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    while (fields.size() < 7) fields.emplace_back();
    LabelOutcome o;
    try {
      o.id = std::stoull(fields[0]);
      o.sampled = std::stoi(fields[1]) != 0;
      o.regular = std::stoi(fields[2]) != 0;
      if (!fields[3].empty()) o.label = std::stod(fields[3]);
      o.bonus_paid = std::stod(fields[4]);
      o.base_paid = std::stod(fields[5]);
      o.effort = std::stod(fields[6]);
    } catch (const std::exception&) {
      throw ParseError("malformed outcome row", line_no);
    }
    out.push_back(o);
  }
  return out;
}

}  // namespace sentinel
