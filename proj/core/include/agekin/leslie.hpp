#pragma once

#include <vector>

#include "agekin/rates.hpp"

namespace agekin {

/// Discrete-age projection model: fecundities f on the first row, survival
/// fractions s on the subdiagonal, one age bin advanced per step.
struct LeslieModel {
  std::vector<double> fecundity;  // mean offspring per step, per bin
  std::vector<double> survival;   // fraction advancing to the next bin
  double bin_width = 0.0;         // age units per step

  LeslieModel(std::vector<double> f, std::vector<double> s, double width);

  /// Discretizes continuous rates: f_i = beta(a_i) * da, s_i = U(a_i, a_{i+1}).
  static LeslieModel from_rates(const AgeRate& beta, const AgeRate& mu,
                                double bin_width, std::size_t bins);

  std::size_t bins() const { return fecundity.size(); }
};

/// Repeated projection; trajectory[k] is the bin vector after k steps.
std::vector<std::vector<double>> leslie_project(const LeslieModel& model,
                                                const std::vector<double>& n0,
                                                std::size_t steps);

}  // namespace agekin
