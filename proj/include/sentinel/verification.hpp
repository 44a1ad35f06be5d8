#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sentinel/payment.hpp"

namespace sentinel {

struct SuiteResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 20260801;
  // Monte Carlo scales; the defaults match the acceptance gates.
  std::size_t unbias_rounds = 10000;
  std::size_t unbias_n = 500;
  std::size_t coverage_rounds = 2000;
  std::size_t coverage_n = 1000;
  std::size_t mest_rounds = 2000;
  std::size_t mest_n = 4000;
  int perturbations = 200;
  std::size_t fidelity_n = 100000;
  int threads = 0;  // 0 = auto

  /// Reduced scales for quick smoke runs.
  static VerifyOptions quick();
};

/// Individual suites. Each returns a pass flag with a measured statistic.
SuiteResult verify_collapse_slope();
SuiteResult verify_sentinel_foc();
SuiteResult verify_optimal_audit_rate();
SuiteResult verify_bonus_design_binding();
SuiteResult verify_variance_equivalence(std::uint64_t seed);
SuiteResult verify_design_optimality(std::uint64_t seed, int perturbations);
SuiteResult verify_estimator_unbiasedness(const VerifyOptions& options);
SuiteResult verify_coverage(const VerifyOptions& options);
SuiteResult verify_m_estimation(const VerifyOptions& options);
SuiteResult verify_simulator_fidelity(const VerifyOptions& options);

/// Runs every suite above in order.
std::vector<SuiteResult> verify_theory(const VerifyOptions& options);
bool all_pass(const std::vector<SuiteResult>& results);

/// Collapse curve on the default grid, for CSV emission.
std::vector<CollapsePoint> default_collapse_curve(double e_min);

}  // namespace sentinel
