#include "agekin/mvf.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "agekin/volterra.hpp"

namespace agekin {

namespace {
std::size_t node_index(double x, double h, const char* what) {
  const double r = std::round(x / h);
  if (r < 0.0 || std::abs(x - r * h) > 1e-9)
    throw std::invalid_argument(std::string(what) + ": not a grid node");
  return static_cast<std::size_t>(r);
}
}  // namespace

double MvfSolution::value(double a, double t, bool upper_at_seam) const {
  const std::size_t i = node_index(a, dt, "mvf value age");
  const std::size_t j = node_index(t, dt, "mvf value time");
  if (j >= fecundity.size()) throw std::invalid_argument("mvf value: t beyond horizon");
  if (i >= survival.size()) return 0.0;
  if (i < j || (i == j && !upper_at_seam)) {
    return fecundity[j - i] * survival[i];
  }
  const std::size_t k = i - j;
  const double gk = (k < initial.size()) ? initial[k] : 0.0;
  return gk * survival[i] / survival[k];
}

double MvfSolution::total(double t) const {
  const std::size_t j = node_index(t, dt, "mvf total time");
  if (j >= fecundity.size()) throw std::invalid_argument("mvf total: t beyond horizon");
  // int_0^t B(t-a) U(0,a) da: both endpoints on the fecundity branch.
  double s = 0.0;
  if (j > 0) {
    s += 0.5 * (fecundity[j] * survival[0] + fecundity[0] * survival[j]);
    for (std::size_t i = 1; i < j; ++i) s += fecundity[j - i] * survival[i];
    s *= dt;
  }
  // int_t^inf g(a-t) U(a-t, a) da over the initial support.
  double s2 = 0.5 * initial[0] * survival[j] / survival[0];
  for (std::size_t k = 1; k + 1 < initial.size(); ++k)
    s2 += initial[k] * survival[k + j] / survival[k];
  s2 += 0.5 * initial[initial.size() - 1] * survival[initial.size() - 1 + j] /
        survival[initial.size() - 1];
  return s + s2 * dt;
}

MvfSolution solve_mvf(const GridFunction& initial, const AgeRate& beta,
                      const AgeRate& mu, double horizon, const MvfOptions& opt) {
  if (beta.population_dependent() || mu.population_dependent())
    throw std::invalid_argument("solve_mvf: rates must be population-independent");
  if (beta.kind() == AgeRate::Kind::GammaHazard && beta.gamma_alpha() < 1.0)
    throw std::invalid_argument(
        "solve_mvf: gamma hazard with alpha < 1 gives a weakly singular kernel");
  for (std::size_t i = 0; i < initial.size(); ++i)
    if (initial[i] < 0.0)
      throw std::domain_error("solve_mvf: negative initial density");
  if (initial.t0() != 0.0)
    throw std::invalid_argument("solve_mvf: initial density must start at age 0");
  if (horizon <= 0.0) throw std::invalid_argument("solve_mvf: horizon must be > 0");

  const double h = opt.dt;
  const std::size_t nt = static_cast<std::size_t>(std::round(horizon / h)) + 1;

  // Resample g onto the step-h age grid.
  const double g_max = initial.back_node();
  const std::size_t ng = static_cast<std::size_t>(std::round(g_max / h)) + 1;
  GridFunction g = GridFunction::zeros(0.0, h, ng);
  for (std::size_t i = 0; i < ng; ++i) g[i] = initial.interp(g.node(i));

  // Truncate the forcing integral where the remaining tail mass of g is
  // negligible.
  std::size_t g_cut = ng;
  {
    const double total_mass = g.quadrature();
    double tail = 0.0;
    while (g_cut > 2) {
      const double piece = 0.5 * (g[g_cut - 1] + g[g_cut - 2]) * h;
      if (tail + piece > opt.tail_mass_tol * std::max(total_mass, 1e-300)) break;
      tail += piece;
      --g_cut;
    }
  }

  // Survival factors: U(a_j, a_i) = survival[i] / survival[j].
  const double a_top = (opt.age_max > 0.0 ? opt.age_max : g_max + horizon);
  const std::size_t na = static_cast<std::size_t>(std::round(a_top / h)) + 1;
  const std::size_t n_surv = std::max(na, std::max(g_cut, ng) + nt);
  std::vector<double> surv(n_surv);
  for (std::size_t i = 0; i < n_surv; ++i)
    surv[i] = std::exp(-mu.cumulative(h * static_cast<double>(i)));

  // Fecundity forcing F(t) = int g(a) U(a, a+t) beta(a+t) da.
  GridFunction forcing = GridFunction::zeros(0.0, h, nt);
  for (std::size_t j = 0; j < nt; ++j) {
    std::vector<double> integrand(g_cut);
    for (std::size_t i = 0; i < g_cut; ++i) {
      const double u = surv[i + j] / surv[i];
      integrand[i] = g[i] * u * beta.eval(h * static_cast<double>(i + j));
    }
    forcing[j] = trapezoid(integrand, h);
  }

  const auto kernel = [&](double t, double s) {
    const double a = t - s;
    return beta.eval(a) * std::exp(-mu.cumulative(a));
  };
  GridFunction fecundity = solve_volterra(kernel, forcing);

  MvfSolution sol;
  sol.fecundity = std::move(fecundity);
  sol.initial = std::move(g);
  sol.survival = std::move(surv);
  sol.dt = h;

  if (opt.materialize_density) {
    GridFunction2D density(0.0, h, na, 0.0, h, nt);
    for (std::size_t j = 0; j < nt; ++j) {
      for (std::size_t i = 0; i < na; ++i) {
        if (i <= j) {
          density(i, j) = sol.fecundity[j - i] * sol.survival[i];
        } else {
          const std::size_t k = i - j;
          const double gk = (k < ng) ? sol.initial[k] : 0.0;
          density(i, j) = gk * sol.survival[i] / sol.survival[k];
        }
      }
    }
    sol.density = std::move(density);
  }
  return sol;
}

}  // namespace agekin
