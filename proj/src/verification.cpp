#include "sentinel/verification.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <thread>

#include "sentinel/campaign.hpp"
#include "sentinel/dataset.hpp"
#include "sentinel/design.hpp"
#include "sentinel/effort_solver.hpp"
#include "sentinel/errors.hpp"
#include "sentinel/estimators.hpp"
#include "sentinel/rng.hpp"
#include "sentinel/simulate.hpp"
#include "sentinel/stats.hpp"

namespace sentinel {

namespace {

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return std::string(buf);
}

int auto_threads(int requested) {
  if (requested > 0) return requested;
  return std::min(8u, std::max(1u, std::thread::hardware_concurrency()));
}

/// Runs `rounds` independent jobs on a small pool; results land in a slot
/// per round so aggregation stays deterministic.
template <typename Fn>
void parallel_rounds(std::size_t rounds, int threads, Fn&& fn) {
  threads = auto_threads(threads);
  if (threads == 1 || rounds < 2) {
    for (std::size_t r = 0; r < rounds; ++r) fn(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= rounds) return;
      fn(r);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace

VerifyOptions VerifyOptions::quick() {
  VerifyOptions o;
  o.unbias_rounds = 1500;
  o.unbias_n = 300;
  o.coverage_rounds = 500;
  o.coverage_n = 500;
  // The m-estimation coverage gate needs its full scale: the plug-in
  // sandwich is conservative at small n and the band is two-sided.
  o.perturbations = 50;
  o.fidelity_n = 30000;
  return o;
}

std::vector<CollapsePoint> default_collapse_curve(double e_min) {
  const EffortModel model = EffortModel::standard();
  std::vector<double> grid(50);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = static_cast<double>(i) / (grid.size() - 1);
    grid[i] = std::pow(10.0, -1.0 - 3.0 * t);  // 1e-1 down to 1e-4
  }
  return collapse_curve(e_min, model, grid);
}

SuiteResult verify_collapse_slope() {
  SuiteResult res;
  res.name = "collapse-slope";
  res.pass = true;
  std::string detail;
  for (double e_min : {0.3, 0.5, 0.8}) {
    const auto curve = default_collapse_curve(e_min);
    std::vector<double> x, y;
    for (const auto& pt : curve) {
      x.push_back(std::log(1.0 / pt.p));
      y.push_back(std::log(pt.required_payment));
    }
    const double slope = stats::linear_fit(x, y).slope;
    if (std::abs(slope - 1.0) > 0.02) res.pass = false;
    detail += fmt("e_min=%.1f slope=%.4f ", e_min, slope);
  }
  res.detail = detail + "(gate 1.00 +/- 0.02)";
  return res;
}

SuiteResult verify_sentinel_foc() {
  SuiteResult res;
  res.name = "sentinel-foc";
  const EffortModel model = EffortModel::standard();
  double max_dev = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double rho = 0.02 + 0.96 * i / 49.0;
    for (int j = 0; j < 50; ++j) {
      const double bonus = 0.1 + 4.9 * j / 49.0;
      const double e = sentinel_effort(rho, bonus, model);
      const double closed = std::min(1.0, rho * bonus);
      max_dev = std::max(max_dev, std::abs(e - closed));
    }
  }
  res.pass = max_dev <= 1e-8;
  res.detail = fmt("max |e - min(1, rho b)| = %.3e on 50x50 grid (gate 1e-8)",
                   max_dev);
  return res;
}

SuiteResult verify_optimal_audit_rate() {
  SuiteResult res;
  res.name = "optimal-audit-rate";
  const double w0 = 0.01, bonus = 1.0;
  DesignProblem problem;
  problem.tau = {1.0, 2.0, 3.0, 4.0};
  problem.budget = 0.04;
  problem.w0 = w0;
  problem.k = 0.0;
  const double rho_opt = design_fixed_b(problem, bonus).scheme.rho;

  const double closed = (-w0 + std::sqrt(w0 * (w0 + bonus))) / bonus;

  // Independent grid search of the scalar budget-variance criterion.
  const auto criterion = [&](double r) {
    return (r * r * bonus + w0) / ((1.0 - r) * r * problem.budget);
  };
  double best_r = 1e-5, best_v = criterion(1e-5);
  for (double r = 1e-5; r < 0.9999; r += 1e-5) {
    const double v = criterion(r);
    if (v < best_v) {
      best_v = v;
      best_r = r;
    }
  }

  const double dev_closed = std::abs(rho_opt - closed);
  const double dev_grid = std::abs(rho_opt - best_r);
  res.pass = dev_closed <= 1e-5 && dev_grid <= 1e-5;
  res.detail = fmt("rho=%.7f closed=%.7f |d|=%.2e, grid=%.5f |d|=%.2e "
                   "(gate 1e-5)",
                   rho_opt, closed, dev_closed, best_r, dev_grid);
  return res;
}

SuiteResult verify_bonus_design_binding() {
  SuiteResult res;
  res.name = "bonus-design-binding";
  const double rho = 0.1, w0 = 0.04, k = 0.5, budget = 2.0;
  CounterRng rng(31, 0, 0);
  DesignProblem problem;
  problem.tau.resize(50);
  for (auto& t : problem.tau) t = 0.1 + 0.9 * rng.next_uniform();
  problem.budget = budget;
  problem.w0 = w0;
  problem.k = k;
  const SamplingDesign design = design_fixed_rho(problem, rho);

  const double bonus = design.scheme.bonus.constant_value();
  const double per_sample =
      rho * bonus * problem.model.q(design.efforts[0]) + w0;
  const double cost = expected_cost(design.scheme, design.pi, design.efforts,
                                    problem.model);
  const double dev_sample = std::abs(per_sample - 2.0 * w0);
  const double rel_budget = std::abs(cost - budget) / budget;
  bool capped = false;
  for (double p : design.pi) capped = capped || p >= 1.0;
  res.pass = dev_sample <= 1e-12 && rel_budget <= 1e-9 && !capped;
  res.detail = fmt("per-sample dev=%.2e (gate 1e-12), budget rel dev=%.2e "
                   "(gate 1e-9), caps=%d",
                   dev_sample, rel_budget, capped ? 1 : 0);
  return res;
}

namespace {

// Fixed discrete population for the variance-equivalence check.
struct DiscretePopulation {
  std::vector<double> p_hat, y, y_false, p, tau;

  static DiscretePopulation make(std::uint64_t seed) {
    DiscretePopulation pop;
    CounterRng rng(seed, 0, 0);
    for (int i = 0; i < 10; ++i) {
      const double ph = 0.05 + 0.9 * rng.next_uniform();
      const double yv = rng.next_bernoulli(ph) ? 1.0 : 0.0;
      pop.p_hat.push_back(ph);
      pop.y.push_back(yv);
      pop.y_false.push_back(1.0 - yv);
      pop.p.push_back(binary_error_prob(ph, yv));
      const double delta = yv - (1.0 - yv);
      pop.tau.push_back(pop.p.back() * delta * delta);
    }
    return pop;
  }

  // Var of the influence term with AI output realized for every instance:
  // conditional moments are exact, the first moment is y.
  double analytic_variance(const std::vector<double>& pi, double rho,
                           const std::vector<double>& q) const {
    const std::size_t n = y.size();
    double second = 0.0, first = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double delta = y[i] - y_false[i];
      const double ef2 =
          (1.0 - p[i]) * y[i] * y[i] + p[i] * y_false[i] * y_false[i];
      second += ef2 + 2.0 * p[i] * y_false[i] * delta +
                p[i] * delta * delta / ((1.0 - rho) * pi[i] * q[i]);
      first += y[i];
    }
    second /= static_cast<double>(n);
    first /= static_cast<double>(n);
    return second - first * first;
  }
};

}  // namespace

SuiteResult verify_variance_equivalence(std::uint64_t seed) {
  SuiteResult res;
  res.name = "variance-equivalence";
  const auto pop = DiscretePopulation::make(seed);
  const std::size_t n = pop.y.size();
  const EffortModel model = EffortModel::standard();

  CounterRng rng(seed, 1, 0);
  const auto random_design = [&]() {
    SamplingDesign d;
    d.pi.resize(n);
    d.efforts.resize(n);
    const double rho = 0.05 + 0.45 * rng.next_uniform();
    for (std::size_t i = 0; i < n; ++i) {
      d.pi[i] = 0.1 + 0.9 * rng.next_uniform();
      d.efforts[i] = 0.2 + 0.75 * rng.next_uniform();
    }
    d.scheme = SentinelScheme{rho, BonusSchedule(1.0), 0.0, 0.0};
    return d;
  };

  double max_resid = 0.0;
  for (int pair = 0; pair < 20; ++pair) {
    const SamplingDesign d1 = random_design();
    const SamplingDesign d2 = random_design();
    std::vector<double> q1(n), q2(n);
    for (std::size_t i = 0; i < n; ++i) {
      q1[i] = model.q(d1.efforts[i]);
      q2[i] = model.q(d2.efforts[i]);
    }
    const double var_diff =
        pop.analytic_variance(d1.pi, d1.scheme.rho, q1) -
        pop.analytic_variance(d2.pi, d2.scheme.rho, q2);
    const double obj_diff = weighted_objective(d1, pop.tau, model) -
                            weighted_objective(d2, pop.tau, model);
    max_resid = std::max(max_resid, std::abs(var_diff - obj_diff));
  }
  res.pass = max_resid <= 1e-10;
  res.detail = fmt("max residual = %.3e over 20 design pairs (gate 1e-10)",
                   max_resid);
  return res;
}

SuiteResult verify_design_optimality(std::uint64_t seed, int perturbations) {
  SuiteResult res;
  res.name = "design-optimality";
  CounterRng rng(seed, 2, 0);
  const std::size_t n = 30;
  DesignProblem problem;
  problem.tau.resize(n);
  for (auto& t : problem.tau) t = 0.05 + 0.95 * rng.next_uniform();
  problem.budget = 1.0;
  problem.w0 = 0.04;
  problem.k = 0.2;

  const EffortModel& model = problem.model;
  double worst_margin = 1e300;

  // Rescales a candidate (pi, rho, bonus schedule) to the same expected cost
  // and compares the variance surrogate with the closed-form design.
  const auto challenge = [&](const SamplingDesign& base,
                             const std::vector<double>& bonus,
                             double rho) -> void {
    std::vector<double> efforts(n), unit(n), pi(n);
    for (std::size_t i = 0; i < n; ++i) {
      efforts[i] = sentinel_effort(rho, bonus[i], model);
      unit[i] = rho * bonus[i] * model.q(efforts[i]) + problem.w0;
      pi[i] = base.pi[i] * (0.6 + 1.0 * rng.next_uniform());
    }
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) cost += unit[i] * pi[i];
    const double avail = problem.budget - rho * problem.k;
    if (!(avail > 0.0)) return;
    const double scale = avail / cost;
    bool valid = true;
    for (std::size_t i = 0; i < n; ++i) {
      pi[i] *= scale;
      valid = valid && pi[i] > 0.0 && pi[i] <= 1.0;
    }
    if (!valid) return;  // capped perturbations are outside the comparison
    SamplingDesign cand;
    cand.pi = pi;
    cand.efforts = efforts;
    cand.scheme = SentinelScheme{rho, BonusSchedule::per_instance(bonus),
                                 problem.w0, problem.k};
    const double margin = weighted_objective(cand, problem.tau, model) -
                          base.objective_value;
    worst_margin = std::min(worst_margin, margin);
  };

  // Both pinned: only pi may move.
  const SamplingDesign ex1 = design_fixed_rho_b(problem, 0.15, 1.2);
  for (int t = 0; t < perturbations; ++t)
    challenge(ex1, std::vector<double>(n, 1.2), 0.15);

  // Bonus pinned: rho and pi may move.
  const SamplingDesign ex2 = design_fixed_b(problem, 1.0);
  for (int t = 0; t < perturbations; ++t) {
    const double rho = std::clamp(
        ex2.scheme.rho * (0.7 + 0.6 * rng.next_uniform()), 1e-4, 0.999);
    challenge(ex2, std::vector<double>(n, 1.0), rho);
  }

  // Audit rate pinned: the bonus schedule and pi may move.
  const SamplingDesign ex3 = design_fixed_rho(problem, 0.1);
  const double b3 = ex3.scheme.bonus.constant_value();
  for (int t = 0; t < perturbations; ++t) {
    std::vector<double> bonus(n);
    for (auto& b : bonus) b = b3 * (0.6 + 1.0 * rng.next_uniform());
    challenge(ex3, bonus, 0.1);
  }

  res.pass = worst_margin >= -1e-12;
  res.detail = fmt("worst objective margin = %.3e over %d perturbations "
                   "per design (gate >= -1e-12)",
                   worst_margin, perturbations);
  return res;
}

namespace {

struct MeanScenario {
  std::string label;
  SyntheticConfig gen;
  double rho;
};

// One sentinel round on a freshly generated dataset.
MeanEstimate sentinel_round_estimate(const SyntheticConfig& gen,
                                     const EffortModel& model, double rho,
                                     double w0, double k, double budget,
                                     std::uint64_t seed, double alpha) {
  const Dataset dataset = generate_synthetic(gen, seed);
  DesignProblem problem;
  problem.tau = estimate_tau(dataset, TauStrategy::binary_calibrated);
  problem.budget = budget;
  problem.w0 = w0;
  problem.k = k;
  problem.model = model;
  problem.pi_floor = 0.005;
  const SamplingDesign design = design_fixed_rho(problem, rho);
  const auto outcomes =
      simulate_round(dataset, design, model, derive_seed(seed, 101, 0));
  return estimate_mean(dataset, outcomes, design, model, alpha);
}

DesignProblem standard_problem(const Dataset& dataset, double budget,
                               double w0, double k, const EffortModel& model) {
  DesignProblem problem;
  problem.tau = estimate_tau(dataset, TauStrategy::binary_calibrated);
  problem.budget = budget;
  problem.w0 = w0;
  problem.k = k;
  problem.model = model;
  problem.pi_floor = 0.005;
  return problem;
}

}  // namespace

SuiteResult verify_estimator_unbiasedness(const VerifyOptions& options) {
  SuiteResult res;
  res.name = "estimator-unbiasedness";
  res.pass = true;
  const EffortModel model = EffortModel::standard();
  const double w0 = 0.25, k = 0.5;

  std::vector<MeanScenario> scenarios;
  {
    SyntheticConfig g;
    g.n = options.unbias_n;
    g.beta_a = 1.0;
    g.beta_b = 1.0;
    scenarios.push_back({"rho=0.05 beta(1,1)", g, 0.05});
    scenarios.push_back({"rho=0.2 beta(1,1)", g, 0.2});
    g.beta_a = 2.0;
    g.beta_b = 5.0;
    g.miscal_exponent = 2.0;
    scenarios.push_back({"rho=0.05 beta(2,5) miscal", g, 0.05});
    g = SyntheticConfig{};
    g.n = options.unbias_n;
    g.beta_a = 0.5;
    g.beta_b = 0.5;
    scenarios.push_back({"rho=0.2 beta(.5,.5)", g, 0.2});
    g.beta_a = 8.0;
    g.beta_b = 2.0;
    g.miscal_exponent = 0.7;
    scenarios.push_back({"rho=0.2 beta(8,2) miscal", g, 0.2});
  }

  std::string detail;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const auto& sc = scenarios[s];
    const double budget =
        0.3 * static_cast<double>(sc.gen.n) * 2.0 * w0 + sc.rho * k;
    const double theta_star = synthetic_population_mean(sc.gen);
    std::vector<double> points(options.unbias_rounds);
    parallel_rounds(options.unbias_rounds, options.threads, [&](std::size_t r) {
      const std::uint64_t seed = derive_seed(options.seed, 1000 + s, r);
      points[r] = sentinel_round_estimate(sc.gen, model, sc.rho, w0, k, budget,
                                          seed, 0.05)
                      .point;
    });
    const auto mv = stats::mean_variance(points);
    const double se = std::sqrt(mv.variance / static_cast<double>(mv.n));
    const double z = std::abs(mv.mean - theta_star) / se;
    if (z > 3.0) res.pass = false;
    detail += fmt("[%s z=%.2f] ", sc.label.c_str(), z);
  }
  res.detail = detail + fmt("M=%zu n=%zu (gate |z| <= 3)",
                            options.unbias_rounds, options.unbias_n);
  return res;
}

SuiteResult verify_coverage(const VerifyOptions& options) {
  SuiteResult res;
  res.name = "coverage";
  ExperimentConfig config = ExperimentConfig::default_config();
  config.synthetic.n = options.coverage_n;
  config.replications = options.coverage_rounds;
  config.base_seed = derive_seed(options.seed, 7, 0);
  config.methods = {Method::ours, Method::active, Method::uniform};
  // One mid-range budget: enough labels for every method at this n.
  config.budgets = {0.3 * static_cast<double>(options.coverage_n)};
  config.threads = options.threads;
  const CampaignReport report = run_campaign(config);

  res.pass = true;
  std::string detail;
  for (const auto& cell : report.cells) {
    if (!cell.ok()) {
      res.pass = false;
      detail += fmt("[%s error: %s] ", method_name(cell.method).c_str(),
                    cell.error.c_str());
      continue;
    }
    if (cell.coverage < 0.93 || cell.coverage > 0.97) res.pass = false;
    detail += fmt("[%s %.4f] ", method_name(cell.method).c_str(),
                  cell.coverage);
  }
  res.detail = detail + fmt("M=%zu n=%zu (gate [0.93, 0.97])",
                            options.coverage_rounds, options.coverage_n);
  return res;
}

SuiteResult verify_m_estimation(const VerifyOptions& options) {
  SuiteResult res;
  res.name = "m-estimation";
  const EffortModel model = EffortModel::standard();
  const double w0 = 0.25, k = 0.5, rho = 0.1;

  SyntheticConfig gen;
  gen.n = 400;
  gen.score_model = SyntheticConfig::ScoreModel::logistic;
  gen.logit_intercept = 0.25;
  gen.logit_slope = 1.0;

  // (a) weighted-loss gradient against central finite differences.
  double max_grad_dev = 0.0;
  {
    const Dataset dataset = generate_synthetic(gen, options.seed);
    DesignProblem problem = standard_problem(
        dataset, 0.3 * static_cast<double>(gen.n) * 2.0 * w0 + rho * k, w0, k,
        model);
    const SamplingDesign design = design_fixed_rho(problem, rho);
    const auto outcomes =
        simulate_round(dataset, design, model, derive_seed(options.seed, 3, 1));
    const LossSpec loss = LossSpec::logistic(2);
    CounterRng rng(options.seed, 4, 0);
    const double h = 1e-6;
    for (int t = 0; t < 50; ++t) {
      Eigen::VectorXd theta(2);
      theta << 2.0 * rng.next_uniform() - 1.0, 2.0 * rng.next_uniform() - 1.0;
      const auto eval = weighted_empirical_loss(dataset, outcomes, design,
                                                model, loss, theta);
      for (int j = 0; j < 2; ++j) {
        Eigen::VectorXd up = theta, dn = theta;
        up[j] += h;
        dn[j] -= h;
        const double fd =
            (weighted_empirical_loss(dataset, outcomes, design, model, loss,
                                     up)
                 .value -
             weighted_empirical_loss(dataset, outcomes, design, model, loss,
                                     dn)
                 .value) /
            (2.0 * h);
        const double rel = std::abs(fd - eval.gradient[j]) /
                           std::max(std::abs(eval.gradient[j]), 1.0);
        max_grad_dev = std::max(max_grad_dev, rel);
      }
    }
  }

  // (b) squared loss reduces to the mean estimator.
  double point_dev = 0.0, var_dev = 0.0;
  {
    SyntheticConfig bg;
    bg.n = 500;
    const Dataset dataset = generate_synthetic(bg, derive_seed(options.seed, 5, 0));
    DesignProblem problem =
        standard_problem(dataset, 0.3 * 500.0 * 2.0 * w0 + rho * k, w0, k,
                         model);
    const SamplingDesign design = design_fixed_rho(problem, rho);
    const auto outcomes =
        simulate_round(dataset, design, model, derive_seed(options.seed, 5, 1));
    const MeanEstimate mean_est =
        estimate_mean(dataset, outcomes, design, model, 0.05);
    const MEstimate m_est = estimate_m(dataset, outcomes, design, model,
                                       LossSpec::squared_mean(), 0.05);
    point_dev = std::abs(m_est.point[0] - mean_est.point);
    var_dev = std::abs(m_est.sandwich(0, 0) - mean_est.variance);
  }

  // (c) logistic coordinate coverage at the generator's true parameters.
  double cov0 = 0.0, cov1 = 0.0;
  {
    gen.n = options.mest_n;
    const double budget =
        0.7 * static_cast<double>(gen.n) * 2.0 * w0 + rho * k;
    std::vector<int> hits0(options.mest_rounds), hits1(options.mest_rounds);
    std::vector<int> usable(options.mest_rounds);
    parallel_rounds(options.mest_rounds, options.threads, [&](std::size_t r) {
      const std::uint64_t seed = derive_seed(options.seed, 6000, r);
      const Dataset dataset = generate_synthetic(gen, seed);
      DesignProblem problem = standard_problem(dataset, budget, w0, k, model);
      const SamplingDesign design = design_fixed_rho(problem, rho);
      const auto outcomes =
          simulate_round(dataset, design, model, derive_seed(seed, 11, 0));
      try {
        const MEstimate est = estimate_m(dataset, outcomes, design, model,
                                         LossSpec::logistic(2), 0.05);
        usable[r] = 1;
        hits0[r] = est.ci_low[0] <= gen.logit_intercept &&
                   gen.logit_intercept <= est.ci_high[0];
        hits1[r] = est.ci_low[1] <= gen.logit_slope &&
                   gen.logit_slope <= est.ci_high[1];
      } catch (const std::exception&) {
        usable[r] = 0;
      }
    });
    double n_ok = 0.0;
    for (std::size_t r = 0; r < options.mest_rounds; ++r) {
      n_ok += usable[r];
      cov0 += hits0[r];
      cov1 += hits1[r];
    }
    cov0 /= std::max(1.0, n_ok);
    cov1 /= std::max(1.0, n_ok);
  }

  res.pass = max_grad_dev <= 1e-5 && point_dev <= 1e-8 && var_dev <= 1e-8 &&
             cov0 >= 0.93 && cov0 <= 0.97 && cov1 >= 0.93 && cov1 <= 0.97;
  res.detail = fmt("grad dev=%.2e (gate 1e-5), reduction dev=(%.1e, %.1e) "
                   "(gate 1e-8), logistic coverage=(%.4f, %.4f) "
                   "(gate 0.95 +/- 0.02, M=%zu)",
                   max_grad_dev, point_dev, var_dev, cov0, cov1,
                   options.mest_rounds);
  return res;
}

SuiteResult verify_simulator_fidelity(const VerifyOptions& options) {
  SuiteResult res;
  res.name = "simulator-fidelity";
  const EffortModel model = EffortModel::standard();
  const std::size_t n = options.fidelity_n;

  // Error probabilities sweep [0.05, 0.95]; truths alternate.
  Dataset dataset;
  dataset.kind = TaskKind::binary;
  dataset.instances.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Instance& inst = dataset.instances[i];
    inst.id = i;
    const double p = 0.05 + 0.9 * (static_cast<double>(i) + 0.5) /
                                static_cast<double>(n);
    inst.y_true = static_cast<double>(i % 2);
    inst.y_false = 1.0 - inst.y_true;
    inst.prediction = inst.y_true == 1.0 ? 1.0 - p : p;
    inst.ai_error_prob = p;
  }

  SamplingDesign design;
  design.pi.assign(n, 1.0);
  const double rho = 0.2, bonus = 2.5;
  design.scheme = SentinelScheme{rho, BonusSchedule(bonus), 0.01, 0.1};
  design.efforts.assign(n, sentinel_effort(rho, bonus, model));
  const double q = model.q(design.efforts[0]);

  const auto outcomes = simulate_round(dataset, design, model,
                                       derive_seed(options.seed, 9, 0));

  std::size_t sampled = 0, sentinels = 0;
  std::vector<double> bin_acc(10, 0.0), bin_expected(10, 0.0);
  std::vector<std::size_t> bin_n(10, 0);
  std::size_t sentinel_bonus = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& o = outcomes[i];
    if (!o.sampled) continue;
    ++sampled;
    if (!o.regular) {
      ++sentinels;
      sentinel_bonus += o.bonus_paid > 0.0 ? 1 : 0;
      continue;
    }
    const double p = dataset.instances[i].ai_error_prob;
    const int bin = std::min(9, static_cast<int>((p - 0.05) / 0.09));
    bin_acc[bin] += (*o.label == dataset.instances[i].y_true) ? 1.0 : 0.0;
    bin_expected[bin] += 1.0 - p * (1.0 - q);
    bin_n[bin] += 1;
  }

  bool pass = true;
  double worst_z = 0.0;
  for (int bin = 0; bin < 10; ++bin) {
    if (bin_n[bin] == 0) {
      pass = false;
      continue;
    }
    const double acc = bin_acc[bin] / bin_n[bin];
    const double expect = bin_expected[bin] / bin_n[bin];
    const double se =
        std::sqrt(std::max(expect * (1.0 - expect), 1e-12) / bin_n[bin]);
    const double z = std::abs(acc - expect) / se;
    worst_z = std::max(worst_z, z);
    if (z > 3.0) pass = false;
  }
  const double sent_rate = static_cast<double>(sentinels) / sampled;
  const double sent_se = std::sqrt(rho * (1.0 - rho) / sampled);
  const double sent_z = std::abs(sent_rate - rho) / sent_se;
  if (sent_z > 3.0) pass = false;

  const double bonus_rate = static_cast<double>(sentinel_bonus) / sentinels;
  const double bonus_se = std::sqrt(q * (1.0 - q) / sentinels);
  const double bonus_z = std::abs(bonus_rate - q) / bonus_se;
  if (bonus_z > 3.0) pass = false;

  res.pass = pass;
  res.detail = fmt("worst per-bin accuracy z=%.2f, sentinel-rate z=%.2f, "
                   "bonus-rate z=%.2f over n=%zu (gate 3)",
                   worst_z, sent_z, bonus_z, n);
  return res;
}

std::vector<SuiteResult> verify_theory(const VerifyOptions& options) {
  std::vector<SuiteResult> out;
  out.push_back(verify_collapse_slope());
  out.push_back(verify_sentinel_foc());
  out.push_back(verify_optimal_audit_rate());
  out.push_back(verify_bonus_design_binding());
  out.push_back(verify_variance_equivalence(options.seed));
  out.push_back(verify_design_optimality(options.seed, options.perturbations));
  out.push_back(verify_estimator_unbiasedness(options));
  out.push_back(verify_coverage(options));
  out.push_back(verify_m_estimation(options));
  out.push_back(verify_simulator_fidelity(options));
  return out;
}

bool all_pass(const std::vector<SuiteResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace sentinel
