#include "sentinel/estimators.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "sentinel/errors.hpp"
#include "sentinel/rng.hpp"
#include "sentinel/stats.hpp"

namespace sentinel {

namespace {

constexpr double kPositivityFloor = 1e-10;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("estimate: alpha must lie in (0, 1)");
}

void check_alignment(std::size_t n_data, std::size_t n_outcomes,
                     const char* what) {
  if (n_data != n_outcomes)
    throw DomainError(std::string(what) +
                      ": outcomes do not align with the dataset");
}

void check_ids(const Dataset& dataset, std::span<const LabelOutcome> outcomes,
               const char* what) {
  check_alignment(dataset.size(), outcomes.size(), what);
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    if (outcomes[i].id != dataset.instances[i].id)
      throw DomainError(std::string(what) +
                        ": outcome ids do not match the dataset order");
}

MeanEstimate from_terms(std::vector<double>& terms, double alpha,
                        std::string method) {
  const auto mv = stats::mean_variance(terms);
  MeanEstimate est;
  est.point = mv.mean;
  est.variance = mv.variance;
  est.alpha = alpha;
  est.n = mv.n;
  est.method = std::move(method);
  const double z = stats::inverse_normal_cdf(1.0 - alpha / 2.0);
  const double half = z * std::sqrt(mv.variance / static_cast<double>(mv.n));
  est.ci_low = est.point - half;
  est.ci_high = est.point + half;
  return est;
}

}  // namespace

MeanEstimate estimate_mean(const Dataset& dataset,
                           std::span<const LabelOutcome> outcomes,
                           const SamplingDesign& design,
                           const EffortModel& model, double alpha) {
  check_alpha(alpha);
  check_ids(dataset, outcomes, "estimate_mean");
  check_alignment(dataset.size(), design.pi.size(), "estimate_mean");
  const double rho = design.scheme.rho;
  if (!(rho >= 0.0 && rho < 1.0))
    throw DomainError("estimate_mean: rho must lie in [0, 1)");

  std::vector<double> terms(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Instance& inst = dataset.instances[i];
    const LabelOutcome& out = outcomes[i];
    const double mass = design.pi[i] * model.q(design.efforts[i]);
    if (!(mass > kPositivityFloor))
      throw DegeneracyError("estimate_mean: pi * q(e) fell below the "
                            "positivity floor");
    double term = inst.prediction;
    if (out.sampled && out.regular) {
      term += (*out.label - inst.prediction) / ((1.0 - rho) * mass);
    }
    terms[i] = term;
  }
  return from_terms(terms, alpha, "sentinel-active");
}

MeanEstimate estimate_mean_active_baseline(const Dataset& dataset,
                                           std::span<const LabelOutcome> outcomes,
                                           std::span<const double> pi,
                                           double effort, double tau_mix,
                                           const EffortModel& model,
                                           double alpha) {
  check_alpha(alpha);
  check_ids(dataset, outcomes, "estimate_mean_active_baseline");
  check_alignment(dataset.size(), pi.size(), "estimate_mean_active_baseline");
  const double q = model.q(effort);

  std::vector<double> terms(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Instance& inst = dataset.instances[i];
    const LabelOutcome& out = outcomes[i];
    const double mass = pi[i] * q;
    if (!(mass > kPositivityFloor))
      throw DegeneracyError("estimate_mean_active_baseline: pi * q(e) fell "
                            "below the positivity floor");
    double term = inst.prediction;
    if (out.sampled) term += (*out.label - inst.prediction) / mass;
    terms[i] = term;
  }
  return from_terms(terms, alpha,
                    "active-baseline(tau_mix=" + std::to_string(tau_mix) + ")");
}

MeanEstimate estimate_mean_uniform(const Dataset& dataset,
                                   std::span<const LabelOutcome> outcomes,
                                   double pi_unif, double effort,
                                   const EffortModel& model, double alpha) {
  std::vector<double> pi(dataset.size(), pi_unif);
  MeanEstimate est = estimate_mean_active_baseline(dataset, outcomes, pi,
                                                   effort, 1.0, model, alpha);
  est.method = "uniform-baseline";
  return est;
}

MeanEstimate estimate_mean_classical(std::span<const LabelOutcome> outcomes,
                                     double pi_unif, double effort,
                                     const EffortModel& model, double alpha) {
  check_alpha(alpha);
  if (!(pi_unif > kPositivityFloor && pi_unif <= 1.0))
    throw DomainError("estimate_mean_classical: pi_unif must lie in (0, 1]");
  const double q = model.q(effort);
  if (std::abs(q - 0.5) < 1e-6)
    throw DegeneracyError("estimate_mean_classical: q(e) too close to the "
                          "correction pole at 1/2");

  std::vector<double> terms(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const LabelOutcome& out = outcomes[i];
    double term = 0.0;
    if (out.sampled) {
      const double y = *out.label;
      if (y != 0.0 && y != 1.0)
        throw DataError("estimate_mean_classical: labels must be binary");
      term = (y + q - 1.0) / (2.0 * q - 1.0) / pi_unif;
    }
    terms[i] = term;
  }
  return from_terms(terms, alpha, "classical");
}

MeanEstimate estimate_odds_ratio(const MeanEstimate& group_a,
                                 const MeanEstimate& group_b, double alpha) {
  check_alpha(alpha);
  const double pa = group_a.point;
  const double pb = group_b.point;
  if (!(pa > 0.0 && pa < 1.0 && pb > 0.0 && pb < 1.0))
    throw DegeneracyError("estimate_odds_ratio: probabilities must lie "
                          "strictly inside (0, 1)");
  const double odds_ratio = (pa / (1.0 - pa)) / (pb / (1.0 - pb));
  // d log-odds / dp = 1 / (p (1 - p)).
  const double var_log =
      group_a.variance / static_cast<double>(group_a.n) /
          ((pa * (1.0 - pa)) * (pa * (1.0 - pa))) +
      group_b.variance / static_cast<double>(group_b.n) /
          ((pb * (1.0 - pb)) * (pb * (1.0 - pb)));
  const double z = stats::inverse_normal_cdf(1.0 - alpha / 2.0);
  MeanEstimate est;
  est.point = odds_ratio;
  est.variance = var_log;  // log-odds-ratio scale
  est.alpha = alpha;
  est.n = group_a.n + group_b.n;
  est.method = "odds-ratio";
  est.ci_low = std::exp(std::log(odds_ratio) - z * std::sqrt(var_log));
  est.ci_high = std::exp(std::log(odds_ratio) + z * std::sqrt(var_log));
  return est;
}

LossSpec LossSpec::squared_mean() {
  LossSpec spec;
  spec.dimension = 1;
  spec.name = "squared-mean";
  spec.value = [](const Eigen::VectorXd& theta, const Instance&, double y) {
    const double r = y - theta[0];
    return 0.5 * r * r;
  };
  spec.gradient = [](const Eigen::VectorXd& theta, const Instance&, double y) {
    Eigen::VectorXd g(1);
    g[0] = theta[0] - y;
    return g;
  };
  spec.hessian = [](const Eigen::VectorXd&, const Instance&, double) {
    Eigen::MatrixXd h(1, 1);
    h(0, 0) = 1.0;
    return h;
  };
  return spec;
}

namespace {

Eigen::VectorXd feature_vector(const Instance& inst, int dimension) {
  if (static_cast<int>(inst.features.size()) != dimension)
    throw DataError("loss: instance " + std::to_string(inst.id) +
                    " lacks a feature vector of dimension " +
                    std::to_string(dimension));
  return Eigen::Map<const Eigen::VectorXd>(inst.features.data(), dimension);
}

}  // namespace

LossSpec LossSpec::squared_linear(int dimension) {
  LossSpec spec;
  spec.dimension = dimension;
  spec.name = "squared-linear";
  spec.value = [dimension](const Eigen::VectorXd& theta, const Instance& inst,
                           double y) {
    const auto x = feature_vector(inst, dimension);
    const double r = y - theta.dot(x);
    return 0.5 * r * r;
  };
  spec.gradient = [dimension](const Eigen::VectorXd& theta,
                              const Instance& inst, double y) {
    const auto x = feature_vector(inst, dimension);
    return Eigen::VectorXd((theta.dot(x) - y) * x);
  };
  spec.hessian = [dimension](const Eigen::VectorXd&, const Instance& inst,
                             double) {
    const auto x = feature_vector(inst, dimension);
    return Eigen::MatrixXd(x * x.transpose());
  };
  return spec;
}

LossSpec LossSpec::logistic(int dimension) {
  LossSpec spec;
  spec.dimension = dimension;
  spec.name = "logistic";
  spec.value = [dimension](const Eigen::VectorXd& theta, const Instance& inst,
                           double y) {
    const auto x = feature_vector(inst, dimension);
    const double eta = theta.dot(x);
    // log(1 + e^eta) - y * eta, evaluated stably.
    const double softplus = eta > 0.0 ? eta + std::log1p(std::exp(-eta))
                                      : std::log1p(std::exp(eta));
    return softplus - y * eta;
  };
  spec.gradient = [dimension](const Eigen::VectorXd& theta,
                              const Instance& inst, double y) {
    const auto x = feature_vector(inst, dimension);
    const double s = 1.0 / (1.0 + std::exp(-theta.dot(x)));
    return Eigen::VectorXd((s - y) * x);
  };
  spec.hessian = [dimension](const Eigen::VectorXd& theta,
                             const Instance& inst, double) {
    const auto x = feature_vector(inst, dimension);
    const double s = 1.0 / (1.0 + std::exp(-theta.dot(x)));
    return Eigen::MatrixXd(s * (1.0 - s) * x * x.transpose());
  };
  return spec;
}

void LossSpec::validate(const Dataset& dataset) const {
  if (dataset.instances.empty()) return;
  CounterRng rng(0x10552u, 0, 0);
  const double h = 1e-6;
  for (int trial = 0; trial < 32; ++trial) {
    const auto& inst = dataset.instances[rng.next_u64() % dataset.size()];
    Eigen::VectorXd theta(dimension);
    for (int j = 0; j < dimension; ++j) theta[j] = 2.0 * rng.next_uniform() - 1.0;
    const double y = rng.next_uniform();
    const Eigen::VectorXd g = gradient(theta, inst, y);
    for (int j = 0; j < dimension; ++j) {
      Eigen::VectorXd up = theta, dn = theta;
      up[j] += h;
      dn[j] -= h;
      const double fd = (value(up, inst, y) - value(dn, inst, y)) / (2.0 * h);
      if (std::abs(fd - g[j]) / std::max(std::abs(g[j]), 1.0) > 1e-5)
        throw DomainError("loss '" + name +
                          "': gradient disagrees with finite differences");
    }
  }
}

WeightedLossEval weighted_empirical_loss(const Dataset& dataset,
                                         std::span<const LabelOutcome> outcomes,
                                         const SamplingDesign& design,
                                         const EffortModel& model,
                                         const LossSpec& loss,
                                         const Eigen::VectorXd& theta) {
  check_ids(dataset, outcomes, "weighted_empirical_loss");
  check_alignment(dataset.size(), design.pi.size(), "weighted_empirical_loss");
  const double rho = design.scheme.rho;
  const int d = loss.dimension;
  WeightedLossEval eval;
  eval.gradient = Eigen::VectorXd::Zero(d);
  eval.hessian = Eigen::MatrixXd::Zero(d, d);

  const double n = static_cast<double>(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Instance& inst = dataset.instances[i];
    const LabelOutcome& out = outcomes[i];
    eval.value += loss.value(theta, inst, inst.prediction);
    eval.gradient += loss.gradient(theta, inst, inst.prediction);
    eval.hessian += loss.hessian(theta, inst, inst.prediction);
    if (out.sampled && out.regular) {
      const double mass = design.pi[i] * model.q(design.efforts[i]);
      if (!(mass > kPositivityFloor))
        throw DegeneracyError("weighted_empirical_loss: pi * q(e) fell below "
                              "the positivity floor");
      const double gamma = 1.0 / ((1.0 - rho) * mass);
      eval.value += gamma * (loss.value(theta, inst, *out.label) -
                             loss.value(theta, inst, inst.prediction));
      eval.gradient += gamma * (loss.gradient(theta, inst, *out.label) -
                                loss.gradient(theta, inst, inst.prediction));
      eval.hessian += gamma * (loss.hessian(theta, inst, *out.label) -
                               loss.hessian(theta, inst, inst.prediction));
    }
  }
  eval.value /= n;
  eval.gradient /= n;
  eval.hessian /= n;
  return eval;
}

MEstimate estimate_m(const Dataset& dataset,
                     std::span<const LabelOutcome> outcomes,
                     const SamplingDesign& design, const EffortModel& model,
                     const LossSpec& loss, double alpha,
                     const NewtonOptions& options) {
  check_alpha(alpha);
  const int d = loss.dimension;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);

  const auto positive_ldlt = [](const Eigen::MatrixXd& h) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    const double scale = std::max(1e-300, h.cwiseAbs().maxCoeff());
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-12 * scale)
      throw DegeneracyError("estimate_m: weighted Hessian is not positive "
                            "definite");
    return ldlt;
  };

  // Damped Newton with backtracking on the weighted loss. Near the solution
  // the value decrease can drop below double resolution; a sufficient
  // gradient-norm decrease then accepts the step instead.
  WeightedLossEval eval =
      weighted_empirical_loss(dataset, outcomes, design, model, loss, theta);
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    if (eval.gradient.norm() <= options.gradient_tol) break;
    const auto ldlt = positive_ldlt(eval.hessian);
    const Eigen::VectorXd step = ldlt.solve(-eval.gradient);
    double rate = 1.0;
    const double slope = eval.gradient.dot(step);
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd cand = theta + rate * step;
      const WeightedLossEval cand_eval = weighted_empirical_loss(
          dataset, outcomes, design, model, loss, cand);
      const bool value_ok =
          cand_eval.value <= eval.value + 1e-4 * rate * slope;
      const bool gradient_ok =
          cand_eval.gradient.norm() <= 0.9 * eval.gradient.norm();
      if (value_ok || gradient_ok) {
        theta = cand;
        eval = cand_eval;
        moved = true;
        break;
      }
      rate *= 0.5;
    }
    if (!moved)
      throw OptimizationError("estimate_m: line search failed to make "
                              "progress");
  }
  if (eval.gradient.norm() > options.gradient_tol)
    throw OptimizationError("estimate_m: Newton did not reach the gradient "
                            "tolerance in " +
                            std::to_string(options.max_iterations) +
                            " iterations");

  // Sandwich: H^-1 M H^-1 with M the covariance of the per-instance gradient
  // influence terms at the solution.
  const double rho = design.scheme.rho;
  const std::size_t n = dataset.size();
  std::vector<Eigen::VectorXd> influences;
  influences.reserve(n);
  Eigen::VectorXd mean_influence = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < n; ++i) {
    const Instance& inst = dataset.instances[i];
    const LabelOutcome& out = outcomes[i];
    Eigen::VectorXd g = loss.gradient(theta, inst, inst.prediction);
    if (out.sampled && out.regular) {
      const double mass = design.pi[i] * model.q(design.efforts[i]);
      const double gamma = 1.0 / ((1.0 - rho) * mass);
      g += gamma * (loss.gradient(theta, inst, *out.label) -
                    loss.gradient(theta, inst, inst.prediction));
    }
    mean_influence += g;
    influences.push_back(std::move(g));
  }
  mean_influence /= static_cast<double>(n);
  Eigen::MatrixXd grad_cov = Eigen::MatrixXd::Zero(d, d);
  for (const auto& g : influences) {
    const Eigen::VectorXd c = g - mean_influence;
    grad_cov += c * c.transpose();
  }
  if (n > 1) grad_cov /= static_cast<double>(n - 1);

  const auto ldlt = positive_ldlt(eval.hessian);
  const Eigen::MatrixXd h_inv =
      ldlt.solve(Eigen::MatrixXd::Identity(d, d));

  MEstimate est;
  est.point = theta;
  est.sandwich = h_inv * grad_cov * h_inv;
  est.alpha = alpha;
  est.n = n;
  est.gradient_norm = eval.gradient.norm();
  est.iterations = iter;
  const double z = stats::inverse_normal_cdf(1.0 - alpha / 2.0);
  est.ci_low.resize(d);
  est.ci_high.resize(d);
  for (int j = 0; j < d; ++j) {
    const double half =
        z * std::sqrt(est.sandwich(j, j) / static_cast<double>(n));
    est.ci_low[j] = theta[j] - half;
    est.ci_high[j] = theta[j] + half;
  }
  return est;
}

}  // namespace sentinel
