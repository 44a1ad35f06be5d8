#include "sentinel/numeric.hpp"

#include <cmath>

#include "sentinel/errors.hpp"

namespace sentinel::numeric {

double golden_section_min(const std::function<double(double)>& f, double a,
                          double b, double tol, int max_iter) {
  if (!(b >= a)) throw DomainError("golden_section_min: empty interval");
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - (b - a) * invphi;
  double d = a + (b - a) * invphi;
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iter && (b - a) > tol; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * invphi;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * invphi;
      fd = f(d);
    }
  }
  return (a + b) / 2.0;
}

double bisect_nonincreasing(const std::function<double(double)>& g, double lo,
                            double hi, double tol) {
  double glo = g(lo);
  double ghi = g(hi);
  if (glo < 0.0) return lo;
  if (ghi > 0.0) return hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace sentinel::numeric
