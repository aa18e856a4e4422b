#include "agekin/fission.hpp"

#include <cmath>
#include <stdexcept>

#include "agekin/volterra.hpp"

namespace agekin {

namespace {

void check_rates(const AgeRate& beta, const AgeRate& mu) {
  if (beta.population_dependent() || mu.population_dependent())
    throw std::invalid_argument("fission: rates must be population-independent");
  if (beta.kind() == AgeRate::Kind::GammaHazard && beta.gamma_alpha() < 1.0)
    throw std::invalid_argument(
        "fission: gamma hazard with alpha < 1 gives a weakly singular kernel");
}

double cumulative_gamma(const AgeRate& beta, const AgeRate& mu, double a) {
  return beta.cumulative(a) + mu.cumulative(a);
}

std::size_t node_of(double x, double h, const char* what) {
  const double r = std::round(x / h);
  if (r < 0.0 || std::abs(x - r * h) > 1e-9)
    throw std::invalid_argument(std::string(what) + ": not a grid node");
  return static_cast<std::size_t>(r);
}

}  // namespace

double FissionMeanField::propagator_u(double x, double t1, double t2) const {
  if (t2 < t1) throw std::domain_error("propagator_u: t2 < t1");
  if (x > t1 + 1e-12) throw std::domain_error("propagator_u: x > t1");
  return std::exp(-(cumulative_gamma(beta_, mu_, t2 - x) -
                    cumulative_gamma(beta_, mu_, t1 - x)));
}

FissionXYT FissionMeanField::eval_xyt(double x, double t) const {
  if (x > t + 1e-12) throw std::domain_error("eval_xyt: x > t (future TOB)");
  FissionXYT out;
  if (x >= 0.0) {
    const double b = fecundity_[fecundity_.index_of(x)];
    const std::size_t age = node_of(t - x, h_, "eval_xyt age");
    const double u = std::exp(-lam_[age]);
    out.x = 2.0 * b * u * (1.0 - u);
    out.y = b * u * u;
  } else {
    if (point_mass_) return out;  // zero density a.e.; the atom is separate
    const double x0 = init_x0_.interp(x);
    const double y0 = init_y0_.interp(x);
    const double u = propagator_u(x, 0.0, t);
    out.x = x0 * u + 2.0 * y0 * u * (1.0 - u);
    out.y = y0 * u * u;
  }
  out.t = out.x + 2.0 * out.y;
  return out;
}

double FissionMeanField::total_population(double t) const {
  const std::size_t j = fecundity_.index_of(t);
  // 2 int_0^t B(x) U(x;x,t) dx.
  double s = 0.0;
  if (j > 0) {
    std::vector<double> integrand(j + 1);
    for (std::size_t i = 0; i <= j; ++i)
      integrand[i] = fecundity_[i] * std::exp(-lam_[j - i]);
    s = 2.0 * trapezoid(integrand, h_);
  }
  // Founder contribution.
  if (point_mass_) {
    s += std::exp(-lam_[j]);
  } else {
    std::vector<double> integrand(init_x0_.size());
    for (std::size_t i = 0; i < init_x0_.size(); ++i) {
      const double x = init_x0_.node(i);
      integrand[i] = (init_x0_[i] + 2.0 * init_y0_[i]) * propagator_u(x, 0.0, t);
    }
    s += trapezoid(integrand, init_x0_.dt());
  }
  return s;
}

FissionMeanField solve_fission_B(const AgeRate& beta, const AgeRate& mu,
                                 double horizon, double dt) {
  check_rates(beta, mu);
  if (horizon <= 0.0 || dt <= 0.0)
    throw std::invalid_argument("solve_fission_B: bad horizon or dt");

  FissionMeanField f;
  f.beta_ = beta;
  f.mu_ = mu;
  f.h_ = dt;
  f.horizon_ = horizon;
  f.point_mass_ = true;

  const std::size_t nt = static_cast<std::size_t>(std::round(horizon / dt)) + 1;
  // Cumulative event hazard at the grid ages, shared by kernel, forcing and
  // later quadratures.
  f.lam_.resize(nt);
  std::vector<double> kernel(nt), surv(nt);
  GridFunction forcing = GridFunction::zeros(0.0, dt, nt);
  for (std::size_t i = 0; i < nt; ++i) {
    const double a = dt * static_cast<double>(i);
    f.lam_[i] = cumulative_gamma(beta, mu, a);
    surv[i] = std::exp(-f.lam_[i]);
    const double b = beta.eval(a);
    kernel[i] = 2.0 * surv[i] * b;
    forcing[i] = surv[i] * b;
  }
  f.fecundity_ = solve_volterra_conv(kernel, forcing);
  return f;
}

FissionMeanField solve_fission_B(const AgeRate& beta, const AgeRate& mu,
                                 const GridFunction& x0, const GridFunction& y0,
                                 double horizon, double dt) {
  check_rates(beta, mu);
  if (x0.size() != y0.size() || x0.t0() != y0.t0() || x0.dt() != y0.dt())
    throw std::invalid_argument("solve_fission_B: founder grids must match");
  if (x0.back_node() > 1e-12)
    throw std::invalid_argument("solve_fission_B: founder TOBs must lie in x <= 0");

  FissionMeanField f;
  f.beta_ = beta;
  f.mu_ = mu;
  f.h_ = dt;
  f.horizon_ = horizon;
  f.point_mass_ = false;
  f.init_x0_ = x0;
  f.init_y0_ = y0;

  const std::size_t nt = static_cast<std::size_t>(std::round(horizon / dt)) + 1;
  f.lam_.resize(nt);
  std::vector<double> kernel(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    const double a = dt * static_cast<double>(i);
    f.lam_[i] = cumulative_gamma(beta, mu, a);
    kernel[i] = 2.0 * std::exp(-f.lam_[i]) * beta.eval(a);
  }
  GridFunction forcing = GridFunction::zeros(0.0, dt, nt);
  std::vector<double> integrand(x0.size());
  for (std::size_t i = 0; i < nt; ++i) {
    const double t = forcing.node(i);
    for (std::size_t k = 0; k < x0.size(); ++k) {
      const double x = x0.node(k);
      const double u = std::exp(-(cumulative_gamma(beta, mu, t - x) -
                                  cumulative_gamma(beta, mu, -x)));
      integrand[k] = (x0[k] + 2.0 * y0[k]) * u * beta.eval(t - x);
    }
    forcing[i] = trapezoid(integrand, x0.dt());
  }
  f.fecundity_ = solve_volterra_conv(kernel, forcing);
  return f;
}

GridFunction bellman_harris_mean(const GammaBranching& dist, double horizon,
                                 double dt) {
  if (dist.alpha() < 1.0)
    throw std::invalid_argument(
        "bellman_harris_mean: alpha < 1 gives a weakly singular kernel");
  const std::size_t nt = static_cast<std::size_t>(std::round(horizon / dt)) + 1;
  GridFunction forcing = GridFunction::zeros(0.0, dt, nt);
  std::vector<double> kernel(nt);
  const double a2 = dist.a2();
  for (std::size_t i = 0; i < nt; ++i) {
    const double t = forcing.node(i);
    forcing[i] = dist.survival(t);
    kernel[i] = 2.0 * a2 * dist.pdf(t);
  }
  return solve_volterra_conv(kernel, forcing);
}

GridFunction bellman_harris_mean(const GridFunction& g_pdf, double a2,
                                 double horizon, double dt) {
  if (a2 < 0.0 || a2 > 1.0)
    throw std::invalid_argument("bellman_harris_mean: a2 must lie in [0, 1]");
  const std::size_t nt = static_cast<std::size_t>(std::round(horizon / dt)) + 1;
  // Prefix cdf of the tabulated density at the solver resolution.
  GridFunction forcing = GridFunction::zeros(0.0, dt, nt);
  std::vector<double> kernel(nt);
  forcing[0] = 1.0;
  kernel[0] = 2.0 * a2 * g_pdf.interp(0.0);
  double mass = 0.0, prev = g_pdf.interp(0.0);
  for (std::size_t i = 1; i < nt; ++i) {
    const double t = forcing.node(i);
    const double cur = (t <= g_pdf.back_node()) ? g_pdf.interp(t) : 0.0;
    mass += 0.5 * (prev + cur) * dt;
    prev = cur;
    forcing[i] = std::max(0.0, 1.0 - mass);
    kernel[i] = 2.0 * a2 * cur;
  }
  return solve_volterra_conv(kernel, forcing);
}

}  // namespace agekin
