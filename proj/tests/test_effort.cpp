#include <doctest.h>

#include <cmath>
#include <vector>

#include "sentinel/effort_model.hpp"
#include "sentinel/effort_solver.hpp"
#include "sentinel/errors.hpp"
#include "sentinel/rng.hpp"

using namespace sentinel;

namespace {

EffortModel make_model(double q_exp, double c_exp, double c_scale,
                       PaymentUtility::Kind mu_kind, double gamma = 1.0) {
  return EffortModel(CorrectionFamily{q_exp}, EffortCostFamily{c_exp, c_scale},
                     PaymentUtility{mu_kind, gamma});
}

// Independent check: densely scan the sentinel payoff for its maximizer.
double grid_argmax_sentinel(double rho, double bonus, const EffortModel& m) {
  double best_e = 0.0, best_v = -1e300;
  const int steps = 1000000;
  for (int i = 0; i <= steps; ++i) {
    const double e = static_cast<double>(i) / steps;
    const double v = rho * m.utility(bonus) * m.q(e) - m.cost(e);
    if (v > best_v) {
      best_v = v;
      best_e = e;
    }
  }
  return best_e;
}

}  // namespace

TEST_CASE("construction rejects shape violations") {
  // Convex q (exponent above one) fails the concavity grid check.
  CHECK_THROWS_AS(make_model(1.5, 2.0, 1.0, PaymentUtility::Kind::identity),
                  DomainError);
  // Concave cost fails the convexity grid check via the exponent precheck.
  CHECK_THROWS_AS(make_model(1.0, 0.5, 1.0, PaymentUtility::Kind::identity),
                  DomainError);
  CHECK_THROWS_AS(make_model(0.0, 2.0, 1.0, PaymentUtility::Kind::identity),
                  DomainError);
  CHECK_THROWS_AS(make_model(1.0, 2.0, -1.0, PaymentUtility::Kind::identity),
                  DomainError);
  // Convex utility (power above one) fails the utility concavity check.
  CHECK_THROWS_AS(make_model(1.0, 2.0, 1.0, PaymentUtility::Kind::power, 1.5),
                  DomainError);
  CHECK_NOTHROW(make_model(0.5, 3.0, 2.0, PaymentUtility::Kind::power, 0.7));
  CHECK_NOTHROW(make_model(1.0, 1.0, 0.5, PaymentUtility::Kind::shifted_log));
}

TEST_CASE("families satisfy q(1) = 1 and c(0) = 0") {
  const auto m = make_model(0.7, 2.5, 1.3, PaymentUtility::Kind::shifted_log);
  CHECK(m.q(1.0) == doctest::Approx(1.0));
  CHECK(m.cost(0.0) == 0.0);
}

TEST_CASE("analytic derivatives match central finite differences") {
  const std::vector<EffortModel> models = {
      EffortModel::standard(),
      make_model(0.5, 2.0, 1.0, PaymentUtility::Kind::identity),
      make_model(0.7, 3.5, 2.0, PaymentUtility::Kind::power, 0.6),
      make_model(1.0, 1.0, 1.0, PaymentUtility::Kind::shifted_log),
  };
  CounterRng rng(11, 0, 0);
  const double h = 1e-6;
  for (const auto& m : models) {
    for (int t = 0; t < 100; ++t) {
      const double e = 0.001 + 0.998 * rng.next_uniform();
      const double fd_q = (m.q(e + h) - m.q(e - h)) / (2.0 * h);
      const double fd_c = (m.cost(e + h) - m.cost(e - h)) / (2.0 * h);
      CHECK(std::abs(fd_q - m.q_prime(e)) /
                std::max(std::abs(m.q_prime(e)), 1.0) <
            1e-5);
      CHECK(std::abs(fd_c - m.cost_prime(e)) /
                std::max(std::abs(m.cost_prime(e)), 1.0) <
            1e-5);
      const double w = 0.5 + 50.0 * rng.next_uniform();
      const double fd_mu = (m.utility(w + h) - m.utility(w - h)) / (2.0 * h);
      CHECK(std::abs(fd_mu - m.utility_prime(w)) /
                std::max(std::abs(m.utility_prime(w)), 1.0) <
            1e-5);
    }
  }
}

TEST_CASE("sentinel_effort closed form under the standard family") {
  const auto m = EffortModel::standard();
  CHECK(std::abs(sentinel_effort(0.3, 0.5, m) - 0.15) < 1e-9);
  CHECK(sentinel_effort(0.0, 17.0, m) == 0.0);
  CHECK(sentinel_effort(0.9, 10.0, m) == 1.0);
}

TEST_CASE("sentinel_effort rejects invalid inputs") {
  const auto m = EffortModel::standard();
  CHECK_THROWS_AS(sentinel_effort(-0.1, 1.0, m), DomainError);
  CHECK_THROWS_AS(sentinel_effort(1.0, 1.0, m), DomainError);
  CHECK_THROWS_AS(sentinel_effort(0.3, -1.0, m), DomainError);
}

TEST_CASE("sentinel_effort matches min(1, rho b) on a 50x50 grid") {
  const auto m = EffortModel::standard();
  double max_dev = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double rho = 0.02 + 0.96 * i / 49.0;
    for (int j = 0; j < 50; ++j) {
      const double b = 0.05 + 4.95 * j / 49.0;
      max_dev =
          std::max(max_dev, std::abs(sentinel_effort(rho, b, m) -
                                     std::min(1.0, rho * b)));
    }
  }
  CHECK(max_dev <= 1e-10);
}

TEST_CASE("sentinel_effort is monotone in rho and bonus") {
  const auto m = make_model(0.8, 2.5, 1.0, PaymentUtility::Kind::shifted_log);
  double prev = -1.0;
  for (int i = 1; i <= 20; ++i) {
    const double e = sentinel_effort(0.045 * i, 2.0, m);
    CHECK(e >= prev - 1e-12);
    prev = e;
  }
  prev = -1.0;
  for (int j = 0; j <= 20; ++j) {
    const double e = sentinel_effort(0.4, 0.5 * j, m);
    CHECK(e >= prev - 1e-12);
    prev = e;
  }
}

TEST_CASE("sentinel_effort agrees with a dense payoff scan") {
  const auto m = make_model(0.6, 3.0, 1.5, PaymentUtility::Kind::power, 0.8);
  for (const auto& [rho, b] : std::vector<std::pair<double, double>>{
           {0.1, 0.5}, {0.3, 2.0}, {0.7, 4.0}}) {
    const double e = sentinel_effort(rho, b, m);
    const double g = grid_argmax_sentinel(rho, b, m);
    CHECK(std::abs(e - g) < 2e-6);
  }
}

TEST_CASE("best_response_effort examples") {
  CHECK(std::abs(best_response_effort(
                     [](double e) { return 0.15 * e - e * e / 2.0; }, 1e-9) -
                 0.15) < 1e-8);
  CHECK(best_response_effort([](double) { return 3.0; }, 1e-9) == 0.0);
  CHECK(best_response_effort([](double e) { return e - e * e / 2.0; },
                             1e-9) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("best_response_effort rejects non-finite payoffs") {
  CHECK_THROWS_AS(best_response_effort(
                      [](double e) { return e > 0.5 ? 1.0 / 0.0 : 0.0; },
                      1e-6),
                  NumericError);
  CHECK_THROWS_AS(best_response_effort([](double e) { return e; }, 0.0),
                  DomainError);
}

TEST_CASE("best_response_effort tracks a brute-force maximizer") {
  CounterRng rng(21, 0, 0);
  const double tol = 1e-5;
  for (int t = 0; t < 100; ++t) {
    // Random concave payoffs: downward quadratic plus a concave log term.
    const double a = 0.5 + 2.0 * rng.next_uniform();
    const double center = -0.2 + 1.4 * rng.next_uniform();
    const double c = rng.next_uniform();
    const auto payoff = [a, center, c](double e) {
      return -a * (e - center) * (e - center) + c * std::log1p(e);
    };
    const double found = best_response_effort(payoff, tol);
    double best_e = 0.0, best_v = payoff(0.0);
    for (int i = 1; i <= 100000; ++i) {
      const double e = i / 100000.0;
      const double v = payoff(e);
      if (v > best_v) {
        best_v = v;
        best_e = e;
      }
    }
    CHECK(std::abs(found - best_e) <= 2.0 * tol);
  }
}
