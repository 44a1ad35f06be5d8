#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace sentinel::stats {

struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;  // n-1 denominator; 0 when fewer than two values
  std::size_t n = 0;
};

MeanVar mean_variance(std::span<const double> values);

/// Inverse standard normal CDF, p in (0,1). Rational approximation refined
/// with one Halley step against erfc; absolute error below 1e-12.
double inverse_normal_cdf(double p);

/// Standard normal CDF.
double normal_cdf(double x);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares line through (x, y).
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Pool-adjacent-violators fit of a nonincreasing sequence.
std::vector<double> isotonic_nonincreasing(std::span<const double> y);

/// Composite Simpson quadrature with n (even) panels.
double simpson(const std::function<double(double)>& f, double a, double b,
               int n = 512);

double log_beta(double a, double b);

/// FNV-1a digest of a byte string, for config/design provenance.
std::uint64_t fnv1a(std::string_view bytes);
std::string fnv1a_hex(std::string_view bytes);

}  // namespace sentinel::stats
