#pragma once

#include <optional>
#include <string>
#include <vector>

namespace agekin {

/// Gamma-distributed branching times, rescaled to unit mean: shape alpha,
/// rate alpha, so the variance is 1/alpha. a0/a2 are the death/binary-fission
/// probabilities conditional on an event (a0 + a2 = 1).
class GammaBranching {
 public:
  GammaBranching(double alpha, double a2);

  double alpha() const { return alpha_; }
  double a0() const { return 1.0 - a2_; }
  double a2() const { return a2_; }

  double pdf(double t) const;
  /// P(T <= t).
  double cdf(double t) const;
  /// 1 - G(t), computed through the regularized upper incomplete gamma.
  double survival(double t) const;
  /// g(t) / (1 - G(t)); saturates at hazard_cap() once the survival
  /// probability underflows, and flags the saturation.
  double hazard(double t, bool* saturated = nullptr) const;
  /// log(1 - G(t)), stable far into the tail.
  double log_survival(double t) const;

  static constexpr double hazard_cap() { return 1e8; }

 private:
  double alpha_;
  double a2_;
  double log_norm_;  // alpha*log(alpha) - lgamma(alpha)
};

/// Piecewise-constant carrying-capacity attenuation: the base rate is
/// multiplied by max(0, 1 - n/K(t)). K is a step function of time.
struct CapacityModifier {
  std::vector<double> times;  // breakpoints; K = values[i] on [times[i], times[i+1])
  std::vector<double> values;

  static CapacityModifier constant(double K) { return {{0.0}, {K}}; }
  double capacity_at(double t) const;
  double factor(double n, double t) const;
};

/// An age-dependent hazard with optional population-size dependence.
///
/// Kinds: constant c; linear slope*a; gamma_hazard w*g(a)/(1-G(a)) for the
/// unit-mean Gamma family; tabulated (linear interpolation, exact at nodes).
class AgeRate {
 public:
  enum class Kind { Constant, Linear, GammaHazard, Tabulated };

  static AgeRate constant(double c);
  static AgeRate linear(double slope);
  static AgeRate gamma_hazard(double alpha, double weight);
  static AgeRate tabulated(std::vector<double> ages, std::vector<double> values);

  AgeRate with_capacity(CapacityModifier cap) const;

  Kind kind() const { return kind_; }
  bool population_dependent() const { return capacity_.has_value(); }
  const std::optional<CapacityModifier>& capacity() const { return capacity_; }
  double gamma_alpha() const;

  /// Hazard at age a in a population of size n at time t. t only matters for
  /// a time-dependent capacity table.
  double eval(double a, double n = 0.0, double t = 0.0) const;

  /// Integral of the base hazard over [0, a]. Closed forms for
  /// constant/linear/gamma kinds; trapezoid prefix sums for tabulated.
  double cumulative(double a) const;

  /// Upper bound of eval over ages [a_lo, a_hi] and all population sizes.
  double max_over(double a_lo, double a_hi) const;

  std::string describe() const;

 private:
  AgeRate(Kind k) : kind_(k) {}
  double base(double a) const;

  Kind kind_;
  double c_ = 0.0;                         // Constant
  double slope_ = 0.0;                     // Linear
  std::optional<GammaBranching> gamma_;    // GammaHazard
  double weight_ = 1.0;                    // GammaHazard
  std::vector<double> tab_ages_, tab_values_, tab_cum_;  // Tabulated
  std::optional<CapacityModifier> capacity_;
};

/// Survival probability exp(-int_{a1}^{a2} mu(s) ds). Requires a1 <= a2 and a
/// population-independent rate.
double propagator(const AgeRate& mu, double a1, double a2);

}  // namespace agekin
