#pragma once

#include <functional>
#include <vector>

#include "agekin/grid.hpp"

namespace agekin {

/// Probability mass function over population sizes 0..n_max at one time.
struct MasterState {
  std::vector<double> pmf;
  double time = 0.0;

  double mean() const;
  double variance() const;
  double mass() const;  // should stay 1 to integration tolerance

  static MasterState delta(std::size_t n, std::size_t n_max);
};

struct MasterOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  /// Mass allowed to accumulate in the top truncation state before the
  /// result is flagged.
  double leakage_tol = 1e-9;
};

struct MasterTrajectory {
  std::vector<MasterState> states;  // one per requested output time
  bool truncation_warning = false;
  double max_boundary_mass = 0.0;   // largest pmf value seen at n_max

  const MasterState& at_time(double t, double tol = 1e-9) const;
};

/// Integrates the forward master equation for per-capita birth/death rates
///   dp_n/dt = -n(b_n + d_n) p_n + (n-1) b_{n-1} p_{n-1} + (n+1) d_{n+1} p_{n+1}
/// with explicit adaptive stepping. beta_n/mu_n map population size to the
/// per-capita rate at that size.
MasterTrajectory master_evolve(const std::function<double(std::size_t)>& beta_n,
                               const std::function<double(std::size_t)>& mu_n,
                               const MasterState& init,
                               const std::vector<double>& output_times,
                               const MasterOptions& opt = {});

/// Truncation heuristic: about 8x the deterministic mean at the horizon.
std::size_t master_default_nmax(double mean0, double net_growth_rate,
                                double horizon);

}  // namespace agekin
