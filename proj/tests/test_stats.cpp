#include <doctest.h>

#include <cmath>
#include <vector>

#include "sentinel/errors.hpp"
#include "sentinel/stats.hpp"

using namespace sentinel;

TEST_CASE("inverse normal cdf hits reference quantiles") {
  CHECK(stats::inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(stats::inverse_normal_cdf(0.975) - 1.959963984540054) < 1e-9);
  CHECK(std::abs(stats::inverse_normal_cdf(0.995) - 2.5758293035489004) <
        1e-9);
  CHECK(std::abs(stats::inverse_normal_cdf(0.025) + 1.959963984540054) < 1e-9);
  CHECK(std::abs(stats::inverse_normal_cdf(1e-6) + 4.753424308822899) < 1e-8);
  CHECK_THROWS_AS(stats::inverse_normal_cdf(0.0), DomainError);
  CHECK_THROWS_AS(stats::inverse_normal_cdf(1.0), DomainError);
}

TEST_CASE("normal cdf inverts the quantile") {
  for (double p : {0.01, 0.2, 0.5, 0.7, 0.999}) {
    CHECK(std::abs(stats::normal_cdf(stats::inverse_normal_cdf(p)) - p) <
          1e-12);
  }
}

TEST_CASE("mean_variance uses the n-1 denominator") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto mv = stats::mean_variance(v);
  CHECK(mv.mean == doctest::Approx(2.5));
  CHECK(mv.variance == doctest::Approx(5.0 / 3.0));
  CHECK(stats::mean_variance(std::vector<double>{3.0}).variance == 0.0);
}

TEST_CASE("linear_fit recovers an exact line") {
  std::vector<double> x, y;
  for (int i = 0; i < 10; ++i) {
    x.push_back(0.3 * i - 2.0);
    y.push_back(1.75 * x.back() + 0.4);
  }
  const auto fit = stats::linear_fit(x, y);
  CHECK(fit.slope == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("isotonic_nonincreasing pools violators and preserves the mean") {
  const std::vector<double> y{5.0, 6.0, 4.0, 4.5, 1.0};
  const auto fit = stats::isotonic_nonincreasing(y);
  REQUIRE(fit.size() == y.size());
  for (std::size_t i = 1; i < fit.size(); ++i) CHECK(fit[i] <= fit[i - 1]);
  double sy = 0.0, sf = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sy += y[i];
    sf += fit[i];
  }
  CHECK(sy == doctest::Approx(sf));
  // Already-monotone input is untouched.
  const std::vector<double> mono{4.0, 3.0, 2.0};
  const auto same = stats::isotonic_nonincreasing(mono);
  for (std::size_t i = 0; i < mono.size(); ++i)
    CHECK(same[i] == doctest::Approx(mono[i]));
}

TEST_CASE("simpson integrates smooth functions") {
  const double val =
      stats::simpson([](double x) { return x * x; }, 0.0, 1.0, 100);
  CHECK(val == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("log_beta matches a known value") {
  // B(2, 3) = 1/12.
  CHECK(std::exp(stats::log_beta(2.0, 3.0)) ==
        doctest::Approx(1.0 / 12.0).epsilon(1e-12));
}

TEST_CASE("fnv1a digest is stable") {
  CHECK(stats::fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(stats::fnv1a_hex("abc") == stats::fnv1a_hex("abc"));
  CHECK(stats::fnv1a_hex("abc") != stats::fnv1a_hex("abd"));
}
