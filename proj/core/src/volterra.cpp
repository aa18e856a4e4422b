#include "agekin/volterra.hpp"

#include <cmath>
#include <stdexcept>

namespace agekin {

GridFunction solve_volterra(const std::function<double(double, double)>& kernel,
                            const GridFunction& forcing) {
  const double dt = forcing.dt();
  const std::size_t n = forcing.size();
  GridFunction b = GridFunction::zeros(forcing.t0(), dt, n);
  b[0] = forcing[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double ti = forcing.node(i);
    double acc = forcing[i] + 0.5 * dt * kernel(ti, forcing.node(0)) * b[0];
    for (std::size_t j = 1; j < i; ++j) {
      acc += dt * kernel(ti, forcing.node(j)) * b[j];
    }
    const double diag = 1.0 - 0.5 * dt * kernel(ti, ti);
    if (std::abs(diag) < 1e-8)
      throw std::runtime_error("solve_volterra: ill-conditioned step (1 - dt/2*k(t,t) ~ 0)");
    b[i] = acc / diag;
  }
  return b;
}

GridFunction solve_volterra_conv(const std::vector<double>& kernel_nodes,
                                 const GridFunction& forcing) {
  const double dt = forcing.dt();
  const std::size_t n = forcing.size();
  if (kernel_nodes.size() < n)
    throw std::invalid_argument("solve_volterra_conv: kernel table too short");
  const double diag = 1.0 - 0.5 * dt * kernel_nodes[0];
  if (std::abs(diag) < 1e-8)
    throw std::runtime_error("solve_volterra_conv: ill-conditioned step");
  GridFunction b = GridFunction::zeros(forcing.t0(), dt, n);
  b[0] = forcing[0];
  for (std::size_t i = 1; i < n; ++i) {
    double acc = forcing[i] + 0.5 * dt * kernel_nodes[i] * b[0];
    for (std::size_t j = 1; j < i; ++j) acc += dt * kernel_nodes[i - j] * b[j];
    b[i] = acc / diag;
  }
  return b;
}

}  // namespace agekin
