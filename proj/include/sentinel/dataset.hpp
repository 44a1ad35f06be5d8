#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sentinel {

enum class TaskKind { binary, continuous };

/// One labeling task. For binary tasks `prediction` is the AI's class score
/// p-hat in [0, 1] (also the value the estimators use as f(X)); for
/// continuous tasks it is the point prediction. `ai_error_prob` is the chance
/// the AI's produced output is wrong, and `y_false` is what it produces when
/// it errs.
struct Instance {
  std::uint64_t id = 0;
  double prediction = 0.0;
  double ai_error_prob = 0.0;
  double y_true = 0.0;
  double y_false = 0.0;
  std::optional<double> uncertainty;
  std::vector<double> features;  // optional covariates for M-estimation
};

struct Dataset {
  TaskKind kind = TaskKind::binary;
  std::vector<Instance> instances;

  std::size_t size() const { return instances.size(); }
  void validate() const;
};

/// Probability that a class prediction drawn with score p_hat misses the
/// realized binary truth: 1 - (p_hat * y + (1 - p_hat) * (1 - y)).
double binary_error_prob(double p_hat, double y_true);

struct SyntheticConfig {
  TaskKind kind = TaskKind::binary;
  std::size_t n = 1000;

  // Binary tasks: class-score model.
  enum class ScoreModel { beta, logistic };
  ScoreModel score_model = ScoreModel::beta;
  double beta_a = 0.5;
  double beta_b = 0.5;
  double logit_intercept = 0.25;  // p-hat = sigmoid(intercept + slope * z),
  double logit_slope = 1.0;       // z ~ N(0,1) stored as a feature
  // Truth is drawn from Bern(p_hat^miscal_exponent); 1 = well calibrated.
  double miscal_exponent = 1.0;

  // Continuous tasks: y = f + sigma * eps with per-instance sigma, an
  // independent symmetric corruption for y_false, and a drawn error rate.
  double pred_scale = 1.0;
  double sigma_lo = 0.5;
  double sigma_hi = 1.5;
  double error_prob_lo = 0.1;
  double error_prob_hi = 0.5;

  void validate() const;
};

/// Reproducible synthetic dataset: identical (config, seed) give bit-identical
/// output. Binary error probabilities follow binary_error_prob.
Dataset generate_synthetic(const SyntheticConfig& config, std::uint64_t seed);

/// Population mean of Y_true under the generator (analytic for the beta score
/// model, quadrature for the logistic one).
double synthetic_population_mean(const SyntheticConfig& config);

/// Column-name mapping for CSV ingestion. Required columns: id, prediction,
/// y_true. ai_error_prob is derived for binary tasks when absent; y_false
/// defaults to 1 - y_true for binary tasks and is required for continuous.
struct CsvSchema {
  TaskKind kind = TaskKind::binary;
  std::string id = "id";
  std::string prediction = "prediction";
  std::string y_true = "y_true";
  std::string y_false = "y_false";
  std::string ai_error_prob = "ai_error_prob";
  std::string uncertainty = "uncertainty";
};

Dataset ingest_csv(std::istream& in, const CsvSchema& schema);
Dataset ingest_csv_file(const std::string& path, const CsvSchema& schema);

/// Header: id,prediction,y_true,y_false,ai_error_prob,uncertainty.
void write_csv(const Dataset& dataset, std::ostream& out);

}  // namespace sentinel
