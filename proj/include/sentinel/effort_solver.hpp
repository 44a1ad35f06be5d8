#pragma once

#include <functional>

#include "sentinel/effort_model.hpp"

namespace sentinel {

/// Effort a rational agent chooses when a fraction rho of sampled tasks are
/// sentinels paying a bonus on correct completion. Solves
///   rho * mu(bonus) * q'(e) = c'(e)
/// on [0, 1]; the payoff is concave, so a corner is returned when the
/// marginal condition has no interior root. rho = 0 yields zero effort.
double sentinel_effort(double rho, double bonus, const EffortModel& model,
                       double tol = 1e-9);

/// Global maximizer of an arbitrary payoff on [0, 1]: a dense scan brackets
/// the maximum, golden-section refines it to |e - e*| <= tol. Flat payoffs
/// resolve to the smallest optimal effort.
double best_response_effort(const std::function<double(double)>& payoff,
                            double tol);

}  // namespace sentinel
