#include <doctest.h>

#include <cmath>
#include <vector>

#include "sentinel/dataset.hpp"
#include "sentinel/design.hpp"
#include "sentinel/errors.hpp"
#include "sentinel/estimators.hpp"
#include "sentinel/rng.hpp"
#include "sentinel/simulate.hpp"
#include "sentinel/stats.hpp"

using namespace sentinel;

namespace {

SamplingDesign manual_design(std::vector<double> pi, double rho,
                             std::vector<double> efforts, double bonus = 1.0) {
  SamplingDesign d;
  d.pi = std::move(pi);
  d.efforts = std::move(efforts);
  d.scheme = SentinelScheme{rho, BonusSchedule(bonus), 0.0, 0.0};
  return d;
}

LabelOutcome outcome(std::uint64_t id, bool sampled, bool regular,
                     std::optional<double> label) {
  LabelOutcome o;
  o.id = id;
  o.sampled = sampled;
  o.regular = regular;
  o.label = label;
  return o;
}

}  // namespace

TEST_CASE("perfect predictor collapses to the prediction mean") {
  const auto m = EffortModel::standard();
  Dataset ds;
  ds.kind = TaskKind::binary;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const double y = static_cast<double>(i % 3 == 0);
    ds.instances.push_back({i, y, binary_error_prob(y, y), y, 1.0 - y,
                            std::nullopt, {}});
  }
  const auto design =
      manual_design(std::vector<double>(20, 0.5), 0.2,
                    std::vector<double>(20, 0.5));
  const auto outcomes = simulate_round(ds, design, m, 77);
  const auto est = estimate_mean(ds, outcomes, design, m, 0.05);

  std::vector<double> preds;
  for (const auto& inst : ds.instances) preds.push_back(inst.prediction);
  const auto mv = stats::mean_variance(preds);
  CHECK(est.point == doctest::Approx(mv.mean).epsilon(1e-15));
  CHECK(est.variance == doctest::Approx(mv.variance).epsilon(1e-15));
  CHECK(est.ci_low <= est.point);
  CHECK(est.point <= est.ci_high);
}

TEST_CASE("single-instance influence term by hand") {
  const auto m = EffortModel::standard();
  Dataset ds;
  ds.kind = TaskKind::binary;
  ds.instances.push_back({0, 0.0, 1.0, 1.0, 0.0, std::nullopt, {}});
  const auto design = manual_design({1.0}, 0.5, {1.0});
  const std::vector<LabelOutcome> outs{outcome(0, true, true, 1.0)};
  const auto est = estimate_mean(ds, outs, design, m, 0.05);
  CHECK(est.point == doctest::Approx(2.0));
  CHECK(est.n == 1);
}

TEST_CASE("ci width follows the normal quantile") {
  const auto m = EffortModel::standard();
  SyntheticConfig cfg;
  cfg.n = 400;
  const auto ds = generate_synthetic(cfg, 5);
  DesignProblem problem;
  problem.tau = estimate_tau(ds, TauStrategy::binary_calibrated);
  problem.budget = 60.0;
  problem.w0 = 0.25;
  problem.k = 0.5;
  problem.pi_floor = 0.005;
  const auto design = design_fixed_rho(problem, 0.1);
  const auto outcomes = simulate_round(ds, design, m, 6);
  const auto est = estimate_mean(ds, outcomes, design, m, 0.05);
  const double z = stats::inverse_normal_cdf(0.975);
  CHECK(est.ci_high - est.ci_low ==
        doctest::Approx(2.0 * z * std::sqrt(est.variance / est.n)));
}

TEST_CASE("positivity floor is enforced") {
  const auto m = EffortModel::standard();
  Dataset ds;
  ds.kind = TaskKind::binary;
  ds.instances.push_back({0, 0.5, 0.5, 1.0, 0.0, std::nullopt, {}});
  const auto design = manual_design({1e-12}, 0.2, {0.5});
  const std::vector<LabelOutcome> outs{outcome(0, false, false, std::nullopt)};
  CHECK_THROWS_AS(estimate_mean(ds, outs, design, m, 0.05), DegeneracyError);
  CHECK_THROWS_AS(estimate_mean(ds, outs, design, m, 1.5), DomainError);
}

TEST_CASE("sentinel labels never touch the estimate") {
  const auto m = EffortModel::standard();
  SyntheticConfig cfg;
  cfg.n = 300;
  const auto ds = generate_synthetic(cfg, 50);
  DesignProblem problem;
  problem.tau = estimate_tau(ds, TauStrategy::binary_calibrated);
  problem.budget = 50.0;
  problem.w0 = 0.25;
  problem.k = 0.5;
  problem.pi_floor = 0.005;
  const auto design = design_fixed_rho(problem, 0.15);
  auto outcomes = simulate_round(ds, design, m, 51);
  const auto est = estimate_mean(ds, outcomes, design, m, 0.05);

  // Permute (flip) the labels of every sentinel-designated instance.
  for (auto& o : outcomes)
    if (o.sampled && !o.regular && o.label) o.label = 1.0 - *o.label;
  const auto est2 = estimate_mean(ds, outcomes, design, m, 0.05);
  CHECK(est.point == est2.point);
  CHECK(est.variance == est2.variance);
  CHECK(est.ci_low == est2.ci_low);
  CHECK(est.ci_high == est2.ci_high);
}

TEST_CASE("baseline with q = 1 is the plain active estimator") {
  const auto m = EffortModel::standard();
  Dataset ds;
  ds.kind = TaskKind::binary;
  ds.instances.push_back({0, 0.3, 0.7, 1.0, 0.0, std::nullopt, {}});
  ds.instances.push_back({1, 0.6, 0.6, 0.0, 1.0, std::nullopt, {}});
  const std::vector<double> pi{0.5, 0.25};
  const std::vector<LabelOutcome> outs{outcome(0, true, true, 1.0),
                                       outcome(1, false, false, std::nullopt)};
  const auto est =
      estimate_mean_active_baseline(ds, outs, pi, 1.0, 0.0, m, 0.05);
  // Hand evaluation: [0.3 + 0.7/0.5 + 0.6] / 2.
  CHECK(est.point == doctest::Approx((0.3 + 1.4 + 0.6) / 2.0));
}

TEST_CASE("uniform estimator with full sampling is the complete-data mean") {
  const auto m = EffortModel::standard();
  SyntheticConfig cfg;
  cfg.n = 200;
  const auto ds = generate_synthetic(cfg, 8);
  SamplingDesign design;
  design.pi.assign(cfg.n, 1.0);
  design.efforts.assign(cfg.n, 1.0);
  design.scheme = SentinelScheme{0.0, BonusSchedule(0.0), 0.0, 0.0};
  const auto outcomes = simulate_round(ds, design, m, 9);
  const auto est = estimate_mean_uniform(ds, outcomes, 1.0, 1.0, m, 0.05);
  double mean_label = 0.0;
  for (const auto& o : outcomes) mean_label += *o.label;
  mean_label /= cfg.n;
  CHECK(est.point == doctest::Approx(mean_label).epsilon(1e-12));
}

TEST_CASE("classical correction hand value and pole") {
  const auto m = EffortModel::standard();
  const std::vector<LabelOutcome> outs{outcome(0, true, true, 1.0)};
  const auto est = estimate_mean_classical(outs, 1.0, 0.8, m, 0.05);
  CHECK(est.point == doctest::Approx(4.0 / 3.0));
  // Noiseless labels need no correction.
  CHECK(estimate_mean_classical(outs, 1.0, 1.0, m, 0.05).point ==
        doctest::Approx(1.0));
  CHECK_THROWS_AS(estimate_mean_classical(outs, 1.0, 0.5, m, 0.05),
                  DegeneracyError);
  const std::vector<LabelOutcome> cont{outcome(0, true, true, 0.7)};
  CHECK_THROWS_AS(estimate_mean_classical(cont, 1.0, 0.8, m, 0.05), DataError);
}

TEST_CASE("classical estimator is unbiased under symmetric flips") {
  const auto m = EffortModel::standard();
  const std::size_t n = 400;
  const double q = 0.8, pi_unif = 0.35;
  Dataset ds;
  ds.kind = TaskKind::binary;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double y = static_cast<double>(i % 5 != 0);  // mean 0.8
    ds.instances.push_back({i, 0.5, 0.5, y, 1.0 - y, std::nullopt, {}});
  }
  double truth = 0.0;
  for (const auto& inst : ds.instances) truth += inst.y_true;
  truth /= n;

  const std::size_t rounds = 4000;
  std::vector<double> points(rounds);
  for (std::size_t r = 0; r < rounds; ++r) {
    std::vector<LabelOutcome> outs(n);
    CounterRng rng(900 + r, 0, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const bool sampled = rng.next_bernoulli(pi_unif);
      std::optional<double> label;
      if (sampled) {
        const bool flip = rng.next_bernoulli(1.0 - q);
        label = flip ? 1.0 - ds.instances[i].y_true : ds.instances[i].y_true;
      }
      outs[i] = outcome(i, sampled, sampled, label);
    }
    points[r] = estimate_mean_classical(outs, pi_unif, 0.8, m, 0.05).point;
  }
  const auto mv = stats::mean_variance(points);
  const double se = std::sqrt(mv.variance / rounds);
  CHECK(std::abs(mv.mean - truth) <= 3.0 * se);
}

TEST_CASE("odds ratio point values and degeneracy") {
  MeanEstimate a, b;
  a.point = 0.8;
  a.variance = 0.01;
  a.n = 500;
  b.point = 0.5;
  b.variance = 0.01;
  b.n = 500;
  const auto est = estimate_odds_ratio(a, b, 0.05);
  CHECK(est.point == doctest::Approx(4.0));
  CHECK(est.ci_low < 4.0);
  CHECK(est.ci_high > 4.0);

  MeanEstimate same = a;
  CHECK(estimate_odds_ratio(a, same, 0.05).point == doctest::Approx(1.0));

  MeanEstimate degenerate = a;
  degenerate.point = 1.0;
  CHECK_THROWS_AS(estimate_odds_ratio(degenerate, b, 0.05), DegeneracyError);
}

TEST_CASE("sentinel estimator is unbiased over regenerated rounds") {
  const auto m = EffortModel::standard();
  SyntheticConfig cfg;
  cfg.n = 250;
  cfg.beta_a = 2.0;
  cfg.beta_b = 5.0;
  cfg.miscal_exponent = 2.0;  // miscalibrated scores
  const double theta_star = synthetic_population_mean(cfg);

  const std::size_t rounds = 3000;
  std::vector<double> points(rounds);
  for (std::size_t r = 0; r < rounds; ++r) {
    const auto ds = generate_synthetic(cfg, derive_seed(123, 0, r));
    DesignProblem problem;
    problem.tau = estimate_tau(ds, TauStrategy::binary_calibrated);
    problem.budget = 40.0;
    problem.w0 = 0.25;
    problem.k = 0.5;
    problem.pi_floor = 0.005;
    const auto design = design_fixed_rho(problem, 0.12);
    const auto outcomes =
        simulate_round(ds, design, m, derive_seed(123, 1, r));
    points[r] = estimate_mean(ds, outcomes, design, m, 0.05).point;
  }
  const auto mv = stats::mean_variance(points);
  const double se = std::sqrt(mv.variance / rounds);
  CHECK(std::abs(mv.mean - theta_star) <= 3.0 * se);
}

TEST_CASE("reported variance tracks the sampling variance of the estimator") {
  const auto m = EffortModel::standard();
  SyntheticConfig cfg;
  cfg.n = 300;
  const double rho = 0.1;

  const std::size_t rounds = 4000;
  std::vector<double> points(rounds), variances(rounds);
  for (std::size_t r = 0; r < rounds; ++r) {
    const auto ds = generate_synthetic(cfg, derive_seed(321, 0, r));
    DesignProblem problem;
    problem.tau = estimate_tau(ds, TauStrategy::binary_calibrated);
    problem.budget = 45.0;
    problem.w0 = 0.25;
    problem.k = 0.5;
    problem.pi_floor = 0.005;
    const auto design = design_fixed_rho(problem, rho);
    const auto outcomes =
        simulate_round(ds, design, m, derive_seed(321, 1, r));
    const auto est = estimate_mean(ds, outcomes, design, m, 0.05);
    points[r] = est.point;
    variances[r] = est.variance;
  }
  const double mean_sigma2 = stats::mean_variance(variances).mean;
  const double var_points = stats::mean_variance(points).variance;
  const double scaled = var_points * static_cast<double>(cfg.n);
  CHECK(std::abs(mean_sigma2 - scaled) / scaled < 0.05);
}

TEST_CASE("coverage smoke test at moderate scale") {
  const auto m = EffortModel::standard();
  SyntheticConfig cfg;
  cfg.n = 500;
  const double theta_star = synthetic_population_mean(cfg);
  const std::size_t rounds = 600;
  std::size_t covered = 0;
  for (std::size_t r = 0; r < rounds; ++r) {
    const auto ds = generate_synthetic(cfg, derive_seed(555, 0, r));
    DesignProblem problem;
    problem.tau = estimate_tau(ds, TauStrategy::binary_calibrated);
    problem.budget = 75.0;
    problem.w0 = 0.25;
    problem.k = 0.5;
    problem.pi_floor = 0.005;
    const auto design = design_fixed_rho(problem, 0.1);
    const auto outcomes =
        simulate_round(ds, design, m, derive_seed(555, 1, r));
    const auto est = estimate_mean(ds, outcomes, design, m, 0.05);
    covered += (est.ci_low <= theta_star && theta_star <= est.ci_high) ? 1 : 0;
  }
  const double coverage = static_cast<double>(covered) / rounds;
  CHECK(coverage > 0.91);
  CHECK(coverage < 0.99);
}

TEST_CASE("no-sentinel baselines are unbiased at pinned effort 0.8") {
  const auto m = EffortModel::standard();
  SyntheticConfig cfg;
  cfg.n = 300;
  cfg.beta_a = 0.5;
  cfg.beta_b = 0.5;
  const auto ds = generate_synthetic(cfg, 2024);
  double truth = 0.0;
  for (const auto& inst : ds.instances) truth += inst.y_true;
  truth /= ds.size();

  const double effort = 0.8, tau_mix = 0.5;
  const auto tau = estimate_tau(ds, TauStrategy::binary_calibrated);
  std::vector<double> sqrt_tau(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i) sqrt_tau[i] = std::sqrt(tau[i]);
  const std::vector<double> unit(ds.size(), 1.0);
  const double labels = 90.0;
  const auto pi_active =
      proportional_allocation(sqrt_tau, unit, labels, 0.005);
  const double pi_unif = labels / static_cast<double>(ds.size());
  std::vector<double> pi_mix(ds.size());
  for (std::size_t i = 0; i < pi_mix.size(); ++i)
    pi_mix[i] = (1.0 - tau_mix) * pi_active[i] + tau_mix * pi_unif;

  SamplingDesign mix_design, unif_design;
  mix_design.pi = pi_mix;
  mix_design.efforts.assign(ds.size(), effort);
  mix_design.scheme = SentinelScheme{0.0, BonusSchedule(0.0), 0.0, 0.0};
  unif_design = mix_design;
  unif_design.pi.assign(ds.size(), pi_unif);

  const std::size_t rounds = 5000;
  std::vector<double> active_pts(rounds), unif_pts(rounds);
  for (std::size_t r = 0; r < rounds; ++r) {
    const auto mix_out =
        simulate_round(ds, mix_design, m, derive_seed(71, 0, r));
    active_pts[r] = estimate_mean_active_baseline(ds, mix_out, pi_mix, effort,
                                                  tau_mix, m, 0.05)
                        .point;
    const auto unif_out =
        simulate_round(ds, unif_design, m, derive_seed(71, 1, r));
    unif_pts[r] =
        estimate_mean_uniform(ds, unif_out, pi_unif, effort, m, 0.05).point;
  }
  const auto mv_a = stats::mean_variance(active_pts);
  CHECK(std::abs(mv_a.mean - truth) <= 3.0 * std::sqrt(mv_a.variance / rounds));
  const auto mv_u = stats::mean_variance(unif_pts);
  CHECK(std::abs(mv_u.mean - truth) <= 3.0 * std::sqrt(mv_u.variance / rounds));
}

TEST_CASE("continuous tasks run the full pipeline unbiased") {
  const auto m = EffortModel::standard();
  SyntheticConfig cfg;
  cfg.kind = TaskKind::continuous;
  cfg.n = 300;
  cfg.sigma_lo = 0.4;
  cfg.sigma_hi = 1.2;
  const double theta_star = synthetic_population_mean(cfg);
  CHECK(theta_star == 0.0);

  const std::size_t rounds = 2500;
  std::vector<double> points(rounds);
  for (std::size_t r = 0; r < rounds; ++r) {
    const auto ds = generate_synthetic(cfg, derive_seed(888, 0, r));
    DesignProblem problem;
    problem.tau = estimate_tau(ds, TauStrategy::column);
    problem.budget = 60.0;
    problem.w0 = 0.25;
    problem.k = 0.5;
    problem.pi_floor = 0.005;
    const auto design = design_fixed_rho(problem, 0.1);
    const auto outcomes =
        simulate_round(ds, design, m, derive_seed(888, 1, r));
    points[r] = estimate_mean(ds, outcomes, design, m, 0.05).point;
  }
  const auto mv = stats::mean_variance(points);
  CHECK(std::abs(mv.mean - theta_star) <=
        3.0 * std::sqrt(mv.variance / rounds));
}

TEST_CASE("odds ratio coverage smoke test") {
  const auto m = EffortModel::standard();
  SyntheticConfig cfg_a, cfg_b;
  cfg_a.n = 400;
  cfg_a.beta_a = 2.0;
  cfg_a.beta_b = 3.0;
  cfg_b.n = 400;
  cfg_b.beta_a = 3.0;
  cfg_b.beta_b = 2.0;
  const double pa = synthetic_population_mean(cfg_a);
  const double pb = synthetic_population_mean(cfg_b);
  const double true_or = (pa / (1.0 - pa)) / (pb / (1.0 - pb));

  const std::size_t rounds = 500;
  std::size_t covered = 0;
  for (std::size_t r = 0; r < rounds; ++r) {
    const auto run = [&](const SyntheticConfig& cfg, std::uint64_t tag) {
      const auto ds = generate_synthetic(cfg, derive_seed(777, tag, r));
      DesignProblem problem;
      problem.tau = estimate_tau(ds, TauStrategy::binary_calibrated);
      problem.budget = 60.0;
      problem.w0 = 0.25;
      problem.k = 0.5;
      problem.pi_floor = 0.005;
      const auto design = design_fixed_rho(problem, 0.1);
      const auto outcomes =
          simulate_round(ds, design, m, derive_seed(777, tag + 10, r));
      return estimate_mean(ds, outcomes, design, m, 0.05);
    };
    const auto est = estimate_odds_ratio(run(cfg_a, 0), run(cfg_b, 1), 0.05);
    covered += (est.ci_low <= true_or && true_or <= est.ci_high) ? 1 : 0;
  }
  const double coverage = static_cast<double>(covered) / rounds;
  CHECK(coverage > 0.90);
  CHECK(coverage < 0.99);
}
