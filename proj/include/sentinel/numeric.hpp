#pragma once

#include <functional>

namespace sentinel::numeric {

/// Golden-section minimizer on [a, b]; returns the midpoint of the final
/// bracket once its width drops below tol.
double golden_section_min(const std::function<double(double)>& f, double a,
                          double b, double tol, int max_iter = 400);

/// Root of a nonincreasing function g on [lo, hi] with g(lo) >= 0 >= g(hi),
/// located by bisection to a bracket narrower than tol.
double bisect_nonincreasing(const std::function<double(double)>& g, double lo,
                            double hi, double tol);

}  // namespace sentinel::numeric
