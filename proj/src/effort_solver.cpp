#include "sentinel/effort_solver.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sentinel/errors.hpp"
#include "sentinel/numeric.hpp"

namespace sentinel {

double sentinel_effort(double rho, double bonus, const EffortModel& model,
                       double tol) {
  if (!(rho >= 0.0) || rho >= 1.0)
    throw DomainError("sentinel_effort: rho must lie in [0, 1)");
  if (!(bonus >= 0.0)) throw DomainError("sentinel_effort: bonus must be >= 0");
  if (!(tol > 0.0)) throw DomainError("sentinel_effort: tol must be positive");

  const double gain = rho * model.utility(bonus);
  if (gain <= 0.0) return 0.0;

  // Marginal payoff gain * q'(e) - c'(e) is nonincreasing (q concave, c
  // convex), so the payoff is concave in e and corner checks settle the
  // boundary cases.
  const auto marginal = [&](double e) {
    const double qp = model.q_prime(e);
    if (std::isinf(qp)) return qp;
    return gain * qp - model.cost_prime(e);
  };
  if (marginal(1.0) >= 0.0) return 1.0;
  if (marginal(0.0) <= 0.0) return 0.0;
  double root = numeric::bisect_nonincreasing(marginal, 0.0, 1.0, tol);

  // Secant polish inside the final bracket; exact for affine marginals.
  for (int i = 0; i < 3; ++i) {
    const double lo = std::max(0.0, root - tol);
    const double hi = std::min(1.0, root + tol);
    const double glo = marginal(lo);
    const double ghi = marginal(hi);
    if (!std::isfinite(glo) || !std::isfinite(ghi) || glo == ghi) break;
    const double next = lo - glo * (hi - lo) / (ghi - glo);
    if (!(next >= 0.0 && next <= 1.0)) break;
    if (std::abs(marginal(next)) >= std::abs(marginal(root))) break;
    root = next;
  }
  return root;
}

double best_response_effort(const std::function<double(double)>& payoff,
                            double tol) {
  if (!(tol > 0.0))
    throw DomainError("best_response_effort: tol must be positive");

  constexpr int kScan = 2000;
  std::vector<double> values(kScan + 1);
  int best = 0;
  for (int i = 0; i <= kScan; ++i) {
    const double e = static_cast<double>(i) / kScan;
    values[i] = payoff(e);
    if (!std::isfinite(values[i]))
      throw NumericError("best_response_effort: payoff is not finite");
    if (values[i] > values[best]) best = i;
  }

  const double lo = std::max(0.0, (best - 1.0) / kScan);
  const double hi = std::min(1.0, (best + 1.0) / kScan);
  double refined = numeric::golden_section_min(
      [&](double e) { return -payoff(e); }, lo, hi, tol);

  // Value comparisons lose resolution within ~sqrt(eps) of the maximizer; a
  // parabolic vertex on a wider stencil recovers the argument.
  {
    const double h = std::max(tol, 1e-6);
    const double m = std::clamp(refined, h, 1.0 - h);
    const double f0 = payoff(m - h);
    const double f1 = payoff(m);
    const double f2 = payoff(m + h);
    const double curvature = f2 - 2.0 * f1 + f0;
    if (curvature < 0.0) {
      const double vertex = m - h * (f2 - f0) / (2.0 * curvature);
      refined = std::clamp(vertex, std::max(0.0, m - h),
                           std::min(1.0, m + h));
    }
  }

  // Ties break toward the least effort.
  double arg = refined;
  double val = payoff(refined);
  const double grid_best = static_cast<double>(best) / kScan;
  if (grid_best < arg && values[best] > val) {
    arg = grid_best;
    val = values[best];
  }
  if (payoff(0.0) >= val) arg = 0.0;
  return arg;
}

}  // namespace sentinel
