#include <doctest.h>

#include <cmath>
#include <vector>

#include "sentinel/dataset.hpp"
#include "sentinel/effort_solver.hpp"
#include "sentinel/errors.hpp"
#include "sentinel/payment.hpp"
#include "sentinel/simulate.hpp"

using namespace sentinel;

namespace {

// Binary dataset with a chosen constant error probability; truths alternate.
Dataset flat_error_dataset(std::size_t n, double p) {
  Dataset ds;
  ds.kind = TaskKind::binary;
  ds.instances.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Instance& inst = ds.instances[i];
    inst.id = i;
    inst.y_true = static_cast<double>(i % 2);
    inst.y_false = 1.0 - inst.y_true;
    inst.prediction = inst.y_true == 1.0 ? 1.0 - p : p;
    inst.ai_error_prob = p;
  }
  return ds;
}

SamplingDesign flat_design(std::size_t n, double pi, double rho, double bonus,
                           double effort, double w0 = 0.0, double k = 0.0) {
  SamplingDesign d;
  d.pi.assign(n, pi);
  d.efforts.assign(n, effort);
  d.scheme = SentinelScheme{rho, BonusSchedule(bonus), w0, k};
  return d;
}

}  // namespace

TEST_CASE("full effort recovers every truth") {
  const auto m = EffortModel::standard();
  const auto ds = flat_error_dataset(500, 0.4);
  // Effort pinned at one: q(1) = 1, even sentinels end up corrected.
  const auto design = flat_design(500, 1.0, 0.3, 1.0, 1.0);
  const auto outcomes = simulate_round(ds, design, m, 42);
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    REQUIRE(outcomes[i].sampled);
    CHECK(*outcomes[i].label == ds.instances[i].y_true);
  }
}

TEST_CASE("nothing sampled leaves only the sentinel operating cost") {
  const auto m = EffortModel::standard();
  const auto ds = flat_error_dataset(100, 0.2);
  const auto design = flat_design(100, 0.0, 0.25, 1.0, 0.5, 0.1, 2.0);
  const auto outcomes = simulate_round(ds, design, m, 1);
  for (const auto& o : outcomes) {
    CHECK_FALSE(o.sampled);
    CHECK_FALSE(o.label.has_value());
    CHECK(o.base_paid == 0.0);
    CHECK(o.bonus_paid == 0.0);
  }
  CHECK(realized_cost(outcomes, design.scheme) == doctest::Approx(0.25 * 2.0));
  CHECK(realized_cost(outcomes, design.scheme, CostMode::per_sentinel) ==
        doctest::Approx(0.0));
}

TEST_CASE("label accuracy matches 1 - p (1 - q(e))") {
  const auto m = EffortModel::standard();
  const std::size_t n = 100000;
  const auto ds = flat_error_dataset(n, 0.2);
  const auto design = flat_design(n, 1.0, 0.0, 0.0, 0.5);
  const auto outcomes = simulate_round(ds, design, m, 7);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i)
    correct += *outcomes[i].label == ds.instances[i].y_true ? 1 : 0;
  const double acc = static_cast<double>(correct) / n;
  CHECK(std::abs(acc - 0.90) < 0.005);
}

TEST_CASE("sentinel frequency and bonus rate") {
  const auto m = EffortModel::standard();
  const std::size_t n = 100000;
  const double rho = 0.3, bonus = 2.0;
  const auto ds = flat_error_dataset(n, 0.1);
  const double effort = 0.45;
  const auto design = flat_design(n, 1.0, rho, bonus, effort, 0.05, 0.0);
  const auto outcomes = simulate_round(ds, design, m, 19);

  std::size_t sentinels = 0, bonuses = 0;
  double paid = 0.0;
  for (const auto& o : outcomes) {
    if (!o.regular) {
      ++sentinels;
      if (o.bonus_paid > 0.0) {
        ++bonuses;
        CHECK(o.bonus_paid == bonus);
      }
    }
    paid += o.base_paid;
  }
  const double sent_rate = static_cast<double>(sentinels) / n;
  CHECK(std::abs(sent_rate - rho) <= 3.0 * std::sqrt(rho * (1.0 - rho) / n));
  const double q = m.q(effort);
  const double bonus_rate = static_cast<double>(bonuses) / sentinels;
  CHECK(std::abs(bonus_rate - q) <=
        3.0 * std::sqrt(q * (1.0 - q) / sentinels));
  CHECK(paid == doctest::Approx(0.05 * n));
}

TEST_CASE("zero bonus never pays a bonus") {
  const auto m = EffortModel::standard();
  const auto ds = flat_error_dataset(2000, 0.3);
  const auto design = flat_design(2000, 1.0, 0.4, 0.0, 0.6);
  for (const auto& o : simulate_round(ds, design, m, 5))
    CHECK(o.bonus_paid == 0.0);
}

TEST_CASE("outcomes are identical under any parallel split") {
  const auto m = EffortModel::standard();
  const std::size_t n = 5000;
  const auto ds = flat_error_dataset(n, 0.25);
  const auto design = flat_design(n, 0.7, 0.2, 1.5, 0.4, 0.02, 0.1);
  const auto serial = simulate_round(ds, design, m, 33, {1});
  const auto parallel = simulate_round(ds, design, m, 33, {7});
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(serial[i].sampled == parallel[i].sampled);
    CHECK(serial[i].regular == parallel[i].regular);
    CHECK(serial[i].label.has_value() == parallel[i].label.has_value());
    if (serial[i].label)
      CHECK(*serial[i].label == *parallel[i].label);
    CHECK(serial[i].bonus_paid == parallel[i].bonus_paid);
  }
}

TEST_CASE("mean realized cost matches the expected cost") {
  const auto m = EffortModel::standard();
  const std::size_t n = 50;
  const auto ds = flat_error_dataset(n, 0.2);
  const double rho = 0.25, bonus = 1.2, w0 = 0.07, k = 0.4;
  const double effort = sentinel_effort(rho, bonus, m);
  const auto design = flat_design(n, 0.6, rho, bonus, effort, w0, k);
  const double expected =
      expected_cost(design.scheme, design.pi, design.efforts, m);

  const std::size_t rounds = 10000;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t r = 0; r < rounds; ++r) {
    const double c =
        realized_cost(simulate_round(ds, design, m, 1000 + r), design.scheme);
    sum += c;
    sum2 += c * c;
  }
  const double mean = sum / rounds;
  const double sd = std::sqrt(sum2 / rounds - mean * mean);
  CHECK(std::abs(mean - expected) <= 3.0 * sd / std::sqrt(rounds));
}

TEST_CASE("per-sentinel cost mode charges realized sentinels") {
  const auto m = EffortModel::standard();
  const std::size_t n = 4000;
  const auto ds = flat_error_dataset(n, 0.2);
  const auto design = flat_design(n, 1.0, 0.3, 0.0, 0.0, 0.0, 2.0);
  const auto outcomes = simulate_round(ds, design, m, 3);
  std::size_t sentinels = 0;
  for (const auto& o : outcomes) sentinels += (o.sampled && !o.regular) ? 1 : 0;
  CHECK(realized_cost(outcomes, design.scheme, CostMode::per_sentinel) ==
        doctest::Approx(2.0 * sentinels));
}

TEST_CASE("design must cover the dataset") {
  const auto m = EffortModel::standard();
  const auto ds = flat_error_dataset(10, 0.2);
  const auto design = flat_design(9, 1.0, 0.2, 1.0, 0.5);
  CHECK_THROWS_AS(simulate_round(ds, design, m, 1), DomainError);
}
