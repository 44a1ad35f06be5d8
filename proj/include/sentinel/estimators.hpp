#pragma once

#include <Eigen/Core>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sentinel/dataset.hpp"
#include "sentinel/design.hpp"
#include "sentinel/simulate.hpp"

namespace sentinel {

/// Point estimate with a CLT confidence interval. `variance` is the sample
/// variance of the per-instance influence terms (n-1 denominator); the
/// interval is point +/- z_{1-alpha/2} * sqrt(variance / n). The odds-ratio
/// estimator reuses this container with `variance` on the log-odds scale and
/// an asymmetric interval.
struct MeanEstimate {
  double point = 0.0;
  double variance = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double alpha = 0.05;
  std::size_t n = 0;
  std::string method;
};

/// Incentive-robust active estimator: residuals of sampled regular instances
/// are inverse-weighted by (1 - rho) pi(X) q(e(X)); unsampled and sentinel
/// instances contribute the prediction alone.
MeanEstimate estimate_mean(const Dataset& dataset,
                           std::span<const LabelOutcome> outcomes,
                           const SamplingDesign& design,
                           const EffortModel& model, double alpha);

/// Debiased active-sampling baseline: no sentinels, effort pinned, residuals
/// weighted by pi(X) q(e). tau_mix records the active/uniform mixing weight
/// used to build pi and is carried into the method tag.
MeanEstimate estimate_mean_active_baseline(const Dataset& dataset,
                                           std::span<const LabelOutcome> outcomes,
                                           std::span<const double> pi,
                                           double effort, double tau_mix,
                                           const EffortModel& model,
                                           double alpha);

/// Active baseline with a constant sampling probability.
MeanEstimate estimate_mean_uniform(const Dataset& dataset,
                                   std::span<const LabelOutcome> outcomes,
                                   double pi_unif, double effort,
                                   const EffortModel& model, double alpha);

/// Horvitz-Thompson survey estimator debiased under a symmetric label-noise
/// model: per sampled instance (Y + q - 1) / (2q - 1); no predictions used.
MeanEstimate estimate_mean_classical(std::span<const LabelOutcome> outcomes,
                                     double pi_unif, double effort,
                                     const EffortModel& model, double alpha);

/// Ratio of odds of two estimated probabilities, interval by the delta
/// method on the log-odds-ratio scale.
MeanEstimate estimate_odds_ratio(const MeanEstimate& group_a,
                                 const MeanEstimate& group_b, double alpha);

/// Convex per-instance loss with analytic derivatives. x is the instance's
/// feature vector (may be ignored), y a label or prediction.
struct LossSpec {
  int dimension = 1;
  std::string name;
  std::function<double(const Eigen::VectorXd&, const Instance&, double)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Instance&,
                                double)>
      gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Instance&,
                                double)>
      hessian;

  /// Intercept-only squared loss (y - theta)^2 / 2; minimizer is the mean.
  static LossSpec squared_mean();
  /// Squared loss with a linear predictor over instance features.
  static LossSpec squared_linear(int dimension);
  /// Logistic loss over instance features; accepts soft labels in [0, 1].
  static LossSpec logistic(int dimension);

  /// Checks the analytic gradient against central finite differences at
  /// random (theta, instance, y); throws DomainError on disagreement.
  void validate(const Dataset& dataset) const;
};

struct WeightedLossEval {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

/// Evaluates the reweighted empirical loss
///   (1/n) sum_i [ l(x_i, f_i) + (l(x_i, Y_i) - l(x_i, f_i)) G_i ],
/// G_i = xi zeta / ((1 - rho) pi q(e)), together with its gradient and
/// Hessian in theta.
WeightedLossEval weighted_empirical_loss(const Dataset& dataset,
                                         std::span<const LabelOutcome> outcomes,
                                         const SamplingDesign& design,
                                         const EffortModel& model,
                                         const LossSpec& loss,
                                         const Eigen::VectorXd& theta);

struct NewtonOptions {
  int max_iterations = 100;
  double gradient_tol = 1e-9;
};

struct MEstimate {
  Eigen::VectorXd point;
  Eigen::MatrixXd sandwich;  // H^-1 M H^-1
  std::vector<double> ci_low;
  std::vector<double> ci_high;
  double alpha = 0.05;
  std::size_t n = 0;
  double gradient_norm = 0.0;
  int iterations = 0;
};

/// Incentive-aware M-estimator: damped Newton with backtracking on the
/// reweighted loss, sandwich covariance from the empirical Hessian and the
/// covariance of the per-instance gradient influence terms.
MEstimate estimate_m(const Dataset& dataset,
                     std::span<const LabelOutcome> outcomes,
                     const SamplingDesign& design, const EffortModel& model,
                     const LossSpec& loss, double alpha,
                     const NewtonOptions& options = {});

}  // namespace sentinel
