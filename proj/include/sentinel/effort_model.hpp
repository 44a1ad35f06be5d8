#pragma once

#include <string>

namespace sentinel {

/// Probability that an AI error gets detected and corrected at effort e:
/// q(e) = e^a with a in (0, 1]. a = 1 is the linear default.
struct CorrectionFamily {
  double exponent = 1.0;

  double value(double e) const;
  double derivative(double e) const;
};

/// Effort cost c(e) = scale * e^m / m with m >= 1, scale > 0.
/// m = 2, scale = 1 is the quadratic default.
struct EffortCostFamily {
  double exponent = 2.0;
  double scale = 1.0;

  double value(double e) const;
  double derivative(double e) const;
};

/// Utility of a monetary payment.
struct PaymentUtility {
  enum class Kind { identity, power, shifted_log };

  Kind kind = Kind::identity;
  double gamma = 1.0;  // exponent for the power family

  double value(double w) const;
  double derivative(double w) const;
  std::string name() const;
};

/// The agent's effort-accuracy-cost-utility model.
///
/// Construction validates the required shape constraints numerically on a
/// 1000-point grid (q nondecreasing, concave, q(1) = 1; c nondecreasing,
/// convex, c(0) = 0; utility strictly increasing and concave on [0, w_max])
/// and checks every analytic derivative against central finite differences.
/// Violations throw DomainError.
class EffortModel {
 public:
  EffortModel(CorrectionFamily q, EffortCostFamily c, PaymentUtility mu,
              double w_max = 100.0);

  /// Linear q, quadratic unit-scale c, identity utility.
  static EffortModel standard();

  double q(double e) const { return q_.value(e); }
  double q_prime(double e) const { return q_.derivative(e); }
  double cost(double e) const { return c_.value(e); }
  double cost_prime(double e) const { return c_.derivative(e); }
  double utility(double w) const { return mu_.value(w); }
  double utility_prime(double w) const { return mu_.derivative(w); }
  double w_max() const { return w_max_; }

  const CorrectionFamily& correction() const { return q_; }
  const EffortCostFamily& effort_cost() const { return c_; }
  const PaymentUtility& payment_utility() const { return mu_; }

  bool linear_correction() const { return q_.exponent == 1.0; }
  bool quadratic_unit_cost() const {
    return c_.exponent == 2.0 && c_.scale == 1.0;
  }
  bool identity_utility() const {
    return mu_.kind == PaymentUtility::Kind::identity;
  }

 private:
  void validate() const;

  CorrectionFamily q_;
  EffortCostFamily c_;
  PaymentUtility mu_;
  double w_max_;
};

}  // namespace sentinel
