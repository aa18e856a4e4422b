#include "agekin/rates.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace agekin {

namespace {
void require_age(double a) {
  if (a < 0.0 || std::isnan(a)) throw std::domain_error("negative age");
}
}  // namespace

// ---------------------------------------------------------------------------
// GammaBranching

GammaBranching::GammaBranching(double alpha, double a2) : alpha_(alpha), a2_(a2) {
  if (!(alpha > 0.0)) throw std::invalid_argument("GammaBranching: alpha must be > 0");
  if (a2 < 0.0 || a2 > 1.0)
    throw std::invalid_argument("GammaBranching: a2 must lie in [0, 1]");
  log_norm_ = alpha_ * std::log(alpha_) - std::lgamma(alpha_);
}

double GammaBranching::pdf(double t) const {
  require_age(t);
  if (t == 0.0) {
    if (alpha_ > 1.0) return 0.0;
    if (alpha_ == 1.0) return 1.0;
    return std::numeric_limits<double>::infinity();
  }
  return std::exp(log_norm_ + (alpha_ - 1.0) * std::log(t) - alpha_ * t);
}

double GammaBranching::cdf(double t) const {
  require_age(t);
  return boost::math::gamma_p(alpha_, alpha_ * t);
}

double GammaBranching::survival(double t) const {
  require_age(t);
  return boost::math::gamma_q(alpha_, alpha_ * t);
}

double GammaBranching::log_survival(double t) const {
  require_age(t);
  const double q = boost::math::gamma_q(alpha_, alpha_ * t);
  if (q > 0.0) return std::log(q);
  // Far tail: g(t)/gamma(t) -> 1/alpha asymptotically, so 1-G ~ g(t)/alpha.
  return log_norm_ + (alpha_ - 1.0) * std::log(t) - alpha_ * t - std::log(alpha_);
}

double GammaBranching::hazard(double t, bool* saturated) const {
  require_age(t);
  if (saturated) *saturated = false;
  const double g = pdf(t);
  const double q = survival(t);
  if (q <= g / hazard_cap()) {
    // Survival underflowed relative to the density: report the cap.
    if (saturated) *saturated = true;
    return hazard_cap();
  }
  return g / q;
}

// ---------------------------------------------------------------------------
// CapacityModifier

double CapacityModifier::capacity_at(double t) const {
  if (times.empty() || times.size() != values.size())
    throw std::invalid_argument("CapacityModifier: malformed table");
  std::size_t i = 0;
  while (i + 1 < times.size() && t >= times[i + 1]) ++i;
  return values[i];
}

double CapacityModifier::factor(double n, double t) const {
  const double K = capacity_at(t);
  if (!(K > 0.0)) throw std::invalid_argument("CapacityModifier: K must be > 0");
  return std::max(0.0, 1.0 - n / K);
}

// ---------------------------------------------------------------------------
// AgeRate

AgeRate AgeRate::constant(double c) {
  if (c < 0.0) throw std::invalid_argument("AgeRate: negative constant rate");
  AgeRate r(Kind::Constant);
  r.c_ = c;
  return r;
}

AgeRate AgeRate::linear(double slope) {
  if (slope < 0.0) throw std::invalid_argument("AgeRate: negative slope");
  AgeRate r(Kind::Linear);
  r.slope_ = slope;
  return r;
}

AgeRate AgeRate::gamma_hazard(double alpha, double weight) {
  if (weight < 0.0) throw std::invalid_argument("AgeRate: negative weight");
  AgeRate r(Kind::GammaHazard);
  r.gamma_.emplace(alpha, 1.0);
  r.weight_ = weight;
  return r;
}

AgeRate AgeRate::tabulated(std::vector<double> ages, std::vector<double> values) {
  if (ages.size() != values.size() || ages.size() < 2)
    throw std::invalid_argument("AgeRate: tabulated needs >= 2 (age, value) pairs");
  for (std::size_t i = 0; i < ages.size(); ++i) {
    if (i > 0 && ages[i] <= ages[i - 1])
      throw std::invalid_argument("AgeRate: tabulated ages must increase");
    if (values[i] < 0.0)
      throw std::invalid_argument("AgeRate: tabulated rate must be >= 0");
  }
  AgeRate r(Kind::Tabulated);
  // Prefix trapezoid integrals at the table nodes.
  r.tab_cum_.assign(ages.size(), 0.0);
  for (std::size_t i = 1; i < ages.size(); ++i) {
    r.tab_cum_[i] = r.tab_cum_[i - 1] +
                    0.5 * (values[i] + values[i - 1]) * (ages[i] - ages[i - 1]);
  }
  r.tab_ages_ = std::move(ages);
  r.tab_values_ = std::move(values);
  return r;
}

AgeRate AgeRate::with_capacity(CapacityModifier cap) const {
  AgeRate r = *this;
  r.capacity_ = std::move(cap);
  return r;
}

double AgeRate::gamma_alpha() const {
  if (kind_ != Kind::GammaHazard)
    throw std::logic_error("AgeRate: not a gamma hazard");
  return gamma_->alpha();
}

double AgeRate::base(double a) const {
  switch (kind_) {
    case Kind::Constant:
      return c_;
    case Kind::Linear:
      return slope_ * a;
    case Kind::GammaHazard:
      return weight_ * gamma_->hazard(a);
    case Kind::Tabulated: {
      if (a <= tab_ages_.front()) return tab_values_.front();
      if (a >= tab_ages_.back()) return tab_values_.back();
      const auto it = std::upper_bound(tab_ages_.begin(), tab_ages_.end(), a);
      const std::size_t i = static_cast<std::size_t>(it - tab_ages_.begin()) - 1;
      const double f = (a - tab_ages_[i]) / (tab_ages_[i + 1] - tab_ages_[i]);
      return tab_values_[i] * (1.0 - f) + tab_values_[i + 1] * f;
    }
  }
  return 0.0;
}

double AgeRate::eval(double a, double n, double t) const {
  require_age(a);
  if (n < 0.0) throw std::domain_error("negative population size");
  double v = base(a);
  if (capacity_) v *= capacity_->factor(n, t);
  return v;
}

double AgeRate::cumulative(double a) const {
  require_age(a);
  switch (kind_) {
    case Kind::Constant:
      return c_ * a;
    case Kind::Linear:
      return 0.5 * slope_ * a * a;
    case Kind::GammaHazard:
      // int_0^a w g/(1-G) = -w log(1-G(a)).
      return -weight_ * gamma_->log_survival(a);
    case Kind::Tabulated: {
      if (a <= tab_ages_.front()) return tab_values_.front() * a;
      double cum = tab_values_.front() * tab_ages_.front();
      if (a >= tab_ages_.back())
        return cum + tab_cum_.back() +
               tab_values_.back() * (a - tab_ages_.back());
      const auto it = std::upper_bound(tab_ages_.begin(), tab_ages_.end(), a);
      const std::size_t i = static_cast<std::size_t>(it - tab_ages_.begin()) - 1;
      const double va = base(a);
      return cum + tab_cum_[i] + 0.5 * (tab_values_[i] + va) * (a - tab_ages_[i]);
    }
  }
  return 0.0;
}

double AgeRate::max_over(double a_lo, double a_hi) const {
  require_age(a_lo);
  if (a_hi < a_lo) throw std::domain_error("max_over: a_hi < a_lo");
  // The capacity factor is <= 1, so the base bound is a population bound too.
  switch (kind_) {
    case Kind::Constant:
      return c_;
    case Kind::Linear:
      return slope_ * a_hi;
    case Kind::GammaHazard: {
      // The unit-mean gamma hazard is monotone: increasing for alpha >= 1,
      // decreasing for alpha < 1.
      const double a = (gamma_->alpha() >= 1.0) ? a_hi : a_lo;
      return weight_ * gamma_->hazard(a);
    }
    case Kind::Tabulated: {
      double m = std::max(base(a_lo), base(a_hi));
      for (std::size_t i = 0; i < tab_ages_.size(); ++i) {
        if (tab_ages_[i] > a_lo && tab_ages_[i] < a_hi)
          m = std::max(m, tab_values_[i]);
      }
      return m;
    }
  }
  return 0.0;
}

std::string AgeRate::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Constant: os << "constant(" << c_ << ")"; break;
    case Kind::Linear: os << "linear(" << slope_ << ")"; break;
    case Kind::GammaHazard:
      os << "gamma_hazard(alpha=" << gamma_->alpha() << ", w=" << weight_ << ")";
      break;
    case Kind::Tabulated:
      os << "tabulated(" << tab_ages_.size() << " nodes)";
      break;
  }
  if (capacity_) os << " * capacity(K=" << capacity_->values.front() << ")";
  return os.str();
}

double propagator(const AgeRate& mu, double a1, double a2) {
  require_age(a1);
  if (a1 > a2) throw std::domain_error("propagator: a1 > a2");
  if (mu.population_dependent())
    throw std::invalid_argument("propagator: rate must be population-independent");
  if (a1 == a2) return 1.0;
  return std::exp(-(mu.cumulative(a2) - mu.cumulative(a1)));
}

}  // namespace agekin
