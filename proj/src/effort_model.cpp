#include "sentinel/effort_model.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "sentinel/errors.hpp"

namespace sentinel {

double CorrectionFamily::value(double e) const {
  if (exponent == 1.0) return e;
  return std::pow(e, exponent);
}

double CorrectionFamily::derivative(double e) const {
  if (exponent == 1.0) return 1.0;
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return exponent * std::pow(e, exponent - 1.0);
}

double EffortCostFamily::value(double e) const {
  if (exponent == 2.0) return scale * e * e / 2.0;
  return scale * std::pow(e, exponent) / exponent;
}

double EffortCostFamily::derivative(double e) const {
  if (exponent == 1.0) return scale;
  if (exponent == 2.0) return scale * e;
  return scale * std::pow(e, exponent - 1.0);
}

double PaymentUtility::value(double w) const {
  switch (kind) {
    case Kind::identity:
      return w;
    case Kind::power:
      return std::pow(w, gamma);
    case Kind::shifted_log:
      return std::log1p(w);
  }
  return w;
}

double PaymentUtility::derivative(double w) const {
  switch (kind) {
    case Kind::identity:
      return 1.0;
    case Kind::power:
      if (gamma == 1.0) return 1.0;
      if (w == 0.0) return std::numeric_limits<double>::infinity();
      return gamma * std::pow(w, gamma - 1.0);
    case Kind::shifted_log:
      return 1.0 / (1.0 + w);
  }
  return 1.0;
}

std::string PaymentUtility::name() const {
  switch (kind) {
    case Kind::identity:
      return "identity";
    case Kind::power:
      return "power";
    case Kind::shifted_log:
      return "shifted-log";
  }
  return "identity";
}

EffortModel::EffortModel(CorrectionFamily q, EffortCostFamily c,
                         PaymentUtility mu, double w_max)
    : q_(q), c_(c), mu_(mu), w_max_(w_max) {
  validate();
}

EffortModel EffortModel::standard() {
  return EffortModel(CorrectionFamily{}, EffortCostFamily{}, PaymentUtility{});
}

namespace {

constexpr int kGridPoints = 1000;
constexpr double kShapeTol = 1e-9;

void check_shape(const std::vector<double>& v, bool want_convex,
                 const char* what) {
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (!std::isfinite(v[i]))
      throw DomainError(std::string(what) + ": non-finite value on grid");
    if (v[i + 1] < v[i] - 1e-12)
      throw DomainError(std::string(what) + ": not nondecreasing");
  }
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const double second = v[i + 1] - 2.0 * v[i] + v[i - 1];
    if (want_convex ? (second < -kShapeTol) : (second > kShapeTol))
      throw DomainError(std::string(what) +
                        (want_convex ? ": not convex" : ": not concave"));
  }
}

template <typename F, typename D>
void check_derivative(F f, D d, double lo, double hi, const char* what) {
  const double h = 1e-5 * (hi - lo);
  for (int i = 0; i < 64; ++i) {
    const double x = lo + (hi - lo) * (i + 0.5) / 64.0;
    const double fd = (f(x + h) - f(x - h)) / (2.0 * h);
    const double an = d(x);
    const double denom = std::max(std::abs(an), 1.0);
    if (!std::isfinite(an) || std::abs(an - fd) / denom > 1e-6)
      throw DomainError(std::string(what) +
                        ": analytic derivative disagrees with finite "
                        "differences");
  }
}

}  // namespace

void EffortModel::validate() const {
  if (!(q_.exponent > 0.0))
    throw DomainError("correction family: exponent must be positive");
  if (!(c_.scale > 0.0))
    throw DomainError("effort cost family: scale must be positive");
  if (!(c_.exponent >= 1.0))
    throw DomainError("effort cost family: exponent must be >= 1");
  if (mu_.kind == PaymentUtility::Kind::power && !(mu_.gamma > 0.0))
    throw DomainError("payment utility: power exponent must be positive");
  if (!(w_max_ > 0.0)) throw DomainError("w_max must be positive");

  std::vector<double> qv(kGridPoints), cv(kGridPoints), mv(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) {
    const double e = static_cast<double>(i) / (kGridPoints - 1);
    qv[i] = q_.value(e);
    cv[i] = c_.value(e);
    mv[i] = mu_.value(w_max_ * e);
  }
  check_shape(qv, /*want_convex=*/false, "correction probability q");
  check_shape(cv, /*want_convex=*/true, "effort cost c");
  check_shape(mv, /*want_convex=*/false, "payment utility");

  if (std::abs(qv.back() - 1.0) > 1e-9)
    throw DomainError("correction probability q: q(1) must equal 1");
  if (std::abs(cv.front()) > 1e-12)
    throw DomainError("effort cost c: c(0) must equal 0");
  for (std::size_t i = 0; i + 1 < mv.size(); ++i)
    if (!(mv[i + 1] > mv[i]))
      throw DomainError("payment utility: not strictly increasing");

  check_derivative([this](double e) { return q_.value(e); },
                   [this](double e) { return q_.derivative(e); }, 0.01, 0.99,
                   "correction probability q");
  check_derivative([this](double e) { return c_.value(e); },
                   [this](double e) { return c_.derivative(e); }, 0.01, 0.99,
                   "effort cost c");
  check_derivative([this](double w) { return mu_.value(w); },
                   [this](double w) { return mu_.derivative(w); },
                   0.01 * w_max_, 0.99 * w_max_, "payment utility");
}

}  // namespace sentinel
