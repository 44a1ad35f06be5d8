#include "sentinel/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "sentinel/errors.hpp"
#include "sentinel/rng.hpp"
#include "sentinel/stats.hpp"

namespace sentinel {

namespace {

// Purpose keys for the per-instance substreams of the generator.
enum GenDraw : std::uint64_t {
  kScore = 0,
  kTruth = 1,
  kResidual = 2,
  kCorruption = 3,
  kErrorProb = 4,
};

bool is_binary_value(double y) { return y == 0.0 || y == 1.0; }

}  // namespace

double binary_error_prob(double p_hat, double y_true) {
  if (!(p_hat >= 0.0 && p_hat <= 1.0))
    throw DomainError("binary_error_prob: score must lie in [0, 1]");
  if (!is_binary_value(y_true))
    throw DomainError("binary_error_prob: y_true must be 0 or 1");
  return 1.0 - (p_hat * y_true + (1.0 - p_hat) * (1.0 - y_true));
}

void Dataset::validate() const {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(instances.size());
  for (const auto& inst : instances) {
    if (!seen.insert(inst.id).second)
      throw DataError("dataset: duplicate instance id " +
                      std::to_string(inst.id));
    if (!std::isfinite(inst.prediction) || !std::isfinite(inst.y_true) ||
        !std::isfinite(inst.y_false))
      throw DataError("dataset: non-finite field in instance " +
                      std::to_string(inst.id));
    if (!(inst.ai_error_prob >= 0.0 && inst.ai_error_prob <= 1.0))
      throw DataError("dataset: ai_error_prob outside [0, 1] in instance " +
                      std::to_string(inst.id));
    if (inst.uncertainty && !(*inst.uncertainty >= 0.0))
      throw DataError("dataset: negative uncertainty in instance " +
                      std::to_string(inst.id));
    if (kind == TaskKind::binary) {
      if (!(inst.prediction >= 0.0 && inst.prediction <= 1.0))
        throw DataError("dataset: binary score outside [0, 1] in instance " +
                        std::to_string(inst.id));
      if (!is_binary_value(inst.y_true) || !is_binary_value(inst.y_false))
        throw DataError("dataset: binary labels must be 0 or 1 in instance " +
                        std::to_string(inst.id));
      if (inst.y_false != 1.0 - inst.y_true)
        throw DataError("dataset: binary y_false must equal 1 - y_true in "
                        "instance " +
                        std::to_string(inst.id));
    }
  }
}

void SyntheticConfig::validate() const {
  if (n == 0) throw DomainError("synthetic config: n must be positive");
  if (kind == TaskKind::binary) {
    if (score_model == ScoreModel::beta && !(beta_a > 0.0 && beta_b > 0.0))
      throw DomainError("synthetic config: beta parameters must be positive");
    if (!(miscal_exponent > 0.0))
      throw DomainError("synthetic config: miscalibration exponent must be "
                        "positive");
  } else {
    if (!(sigma_lo > 0.0 && sigma_hi >= sigma_lo))
      throw DomainError("synthetic config: bad residual scale range");
    if (!(error_prob_lo >= 0.0 && error_prob_hi <= 1.0 &&
          error_prob_hi >= error_prob_lo))
      throw DomainError("synthetic config: bad error probability range");
  }
}

Dataset generate_synthetic(const SyntheticConfig& config, std::uint64_t seed) {
  config.validate();
  Dataset ds;
  ds.kind = config.kind;
  ds.instances.resize(config.n);

  for (std::size_t i = 0; i < config.n; ++i) {
    Instance& inst = ds.instances[i];
    inst.id = i;
    if (config.kind == TaskKind::binary) {
      double p_hat;
      if (config.score_model == SyntheticConfig::ScoreModel::beta) {
        CounterRng score_rng(seed, i, kScore);
        p_hat = score_rng.next_beta(config.beta_a, config.beta_b);
      } else {
        CounterRng score_rng(seed, i, kScore);
        const double z = score_rng.next_normal();
        p_hat = 1.0 / (1.0 + std::exp(-(config.logit_intercept +
                                        config.logit_slope * z)));
        inst.features = {1.0, z};
      }
      const double truth_prob = std::pow(p_hat, config.miscal_exponent);
      CounterRng truth_rng(seed, i, kTruth);
      const double y = truth_rng.next_bernoulli(truth_prob) ? 1.0 : 0.0;
      inst.prediction = p_hat;
      inst.y_true = y;
      inst.y_false = 1.0 - y;
      inst.ai_error_prob = binary_error_prob(p_hat, y);
      inst.uncertainty = p_hat * (1.0 - p_hat);
    } else {
      CounterRng rng(seed, i, kScore);
      const double f = config.pred_scale * rng.next_normal();
      CounterRng res_rng(seed, i, kResidual);
      const double u = res_rng.next_uniform();
      const double sigma = config.sigma_lo + (config.sigma_hi - config.sigma_lo) * u;
      const double y = f + sigma * res_rng.next_normal();
      CounterRng cor_rng(seed, i, kCorruption);
      const double y_false = y + sigma * cor_rng.next_normal();
      CounterRng err_rng(seed, i, kErrorProb);
      const double p = config.error_prob_lo +
                       (config.error_prob_hi - config.error_prob_lo) *
                           err_rng.next_uniform();
      inst.prediction = f;
      inst.y_true = y;
      inst.y_false = y_false;
      inst.ai_error_prob = p;
      inst.uncertainty = sigma * sigma;
    }
  }
  ds.validate();
  return ds;
}

double synthetic_population_mean(const SyntheticConfig& config) {
  config.validate();
  if (config.kind == TaskKind::continuous) return 0.0;  // y centered on f
  const double d = config.miscal_exponent;
  if (config.score_model == SyntheticConfig::ScoreModel::beta) {
    // E[p^d] under Beta(a, b).
    return std::exp(stats::log_beta(config.beta_a + d, config.beta_b) -
                    stats::log_beta(config.beta_a, config.beta_b));
  }
  const double a = config.logit_intercept;
  const double b = config.logit_slope;
  return stats::simpson(
      [&](double z) {
        const double s = 1.0 / (1.0 + std::exp(-(a + b * z)));
        const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
        return std::pow(s, d) * phi;
      },
      -10.0, 10.0, 4000);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& field, std::size_t line,
                    const std::string& column) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(field, &pos);
  } catch (const std::exception&) {
    throw ParseError("column '" + column + "': not a number: '" + field + "'",
                     line);
  }
  if (pos != field.size())
    throw ParseError("column '" + column + "': trailing characters in '" +
                         field + "'",
                     line);
  return v;
}

}  // namespace

Dataset ingest_csv(std::istream& in, const CsvSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  const auto header = split_csv_line(line);
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;

  const auto require = [&](const std::string& name) {
    auto it = col.find(name);
    if (it == col.end())
      throw DataError("csv: missing required column '" + name + "'");
    return it->second;
  };
  const auto optional_col =
      [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = col.find(name);
    if (it == col.end()) return std::nullopt;
    return it->second;
  };

  const std::size_t id_col = require(schema.id);
  const std::size_t pred_col = require(schema.prediction);
  const std::size_t y_col = require(schema.y_true);
  const auto yf_col = optional_col(schema.y_false);
  const auto p_col = optional_col(schema.ai_error_prob);
  const auto u_col = optional_col(schema.uncertainty);

  Dataset ds;
  ds.kind = schema.kind;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) +
                           " fields, got " + std::to_string(fields.size()),
                       line_no);
    Instance inst;
    inst.id = static_cast<std::uint64_t>(
        parse_double(fields[id_col], line_no, schema.id));
    inst.prediction = parse_double(fields[pred_col], line_no, schema.prediction);
    inst.y_true = parse_double(fields[y_col], line_no, schema.y_true);

    if (schema.kind == TaskKind::binary) {
      if (!(inst.prediction >= 0.0 && inst.prediction <= 1.0))
        throw ParseError("binary prediction outside [0, 1]", line_no);
      if (!is_binary_value(inst.y_true))
        throw ParseError("binary y_true must be 0 or 1", line_no);
    }

    if (yf_col && !fields[*yf_col].empty()) {
      inst.y_false = parse_double(fields[*yf_col], line_no, schema.y_false);
    } else if (schema.kind == TaskKind::binary) {
      inst.y_false = 1.0 - inst.y_true;
    } else {
      throw DataError("csv: continuous tasks require a y_false column");
    }

    if (p_col && !fields[*p_col].empty()) {
      inst.ai_error_prob =
          parse_double(fields[*p_col], line_no, schema.ai_error_prob);
      if (!(inst.ai_error_prob >= 0.0 && inst.ai_error_prob <= 1.0))
        throw ParseError("ai_error_prob outside [0, 1]", line_no);
    } else if (schema.kind == TaskKind::binary) {
      inst.ai_error_prob = binary_error_prob(inst.prediction, inst.y_true);
    } else {
      throw DataError("csv: continuous tasks require an ai_error_prob column");
    }

    if (u_col && !fields[*u_col].empty())
      inst.uncertainty = parse_double(fields[*u_col], line_no, schema.uncertainty);

    ds.instances.push_back(std::move(inst));
  }
  ds.validate();
  return ds;
}

Dataset ingest_csv_file(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("csv: cannot open '" + path + "'");
  return ingest_csv(in, schema);
}

void write_csv(const Dataset& dataset, std::ostream& out) {
  out << "id,prediction,y_true,y_false,ai_error_prob,uncertainty\n";
  out.precision(17);
  for (const auto& inst : dataset.instances) {
    out << inst.id << ',' << inst.prediction << ',' << inst.y_true << ','
        << inst.y_false << ',' << inst.ai_error_prob << ',';
    if (inst.uncertainty) out << *inst.uncertainty;
    out << '\n';
  }
}

}  // namespace sentinel
