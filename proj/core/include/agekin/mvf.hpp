#pragma once

#include <vector>

#include "agekin/grid.hpp"
#include "agekin/rates.hpp"

namespace agekin {

/// Solution of the age-transport mean-field equation by characteristics.
///
/// The age and time steps are equal by construction, so characteristics hit
/// grid nodes exactly. rho is discontinuous across the a == t seam; sampled
/// values in `density` carry the fecundity branch there, and `value` lets
/// callers pick the side.
struct MvfSolution {
  GridFunction fecundity;       // B(t) = rho(0, t)
  GridFunction initial;         // g(a) resampled on the age grid
  std::vector<double> survival; // exp(-int_0^{a_i} mu) on the extended age grid
  double dt = 0.0;
  GridFunction2D density;       // empty unless materialized (rows a, cols t)

  double age_top() const {
    return dt * static_cast<double>(survival.size() - 1);
  }

  /// rho at grid nodes; `upper` selects the initial-condition branch at the
  /// a == t seam (default is the fecundity branch).
  double value(double a, double t, bool upper_at_seam = false) const;

  /// Total population int rho(a, t) da, integrated branch-correctly with a
  /// split at the a == t seam.
  double total(double t) const;
};

struct MvfOptions {
  double dt = 1e-3;              // shared age/time step
  double age_max = 0.0;          // 0: derived from the initial grid + horizon
  double tail_mass_tol = 1e-10;  // truncation of the fecundity forcing integral
  bool materialize_density = true;
};

/// Solves d_t rho + d_a rho = -mu(a) rho, rho(0,t) = int beta rho da,
/// rho(a,0) = g(a). Rates must be population-independent. g must be >= 0.
MvfSolution solve_mvf(const GridFunction& initial, const AgeRate& beta,
                      const AgeRate& mu, double horizon,
                      const MvfOptions& opt = {});

}  // namespace agekin
