#include "agekin/leslie.hpp"

#include <stdexcept>

namespace agekin {

LeslieModel::LeslieModel(std::vector<double> f, std::vector<double> s,
                         double width)
    : fecundity(std::move(f)), survival(std::move(s)), bin_width(width) {
  if (fecundity.size() != survival.size() || fecundity.empty())
    throw std::invalid_argument("LeslieModel: f and s sizes must match");
  if (bin_width <= 0.0) throw std::invalid_argument("LeslieModel: bin width <= 0");
  for (double fi : fecundity)
    if (fi < 0.0) throw std::invalid_argument("LeslieModel: f >= 0 required");
  for (double si : survival)
    if (si < 0.0 || si > 1.0)
      throw std::invalid_argument("LeslieModel: s in [0,1] required");
}

LeslieModel LeslieModel::from_rates(const AgeRate& beta, const AgeRate& mu,
                                    double bin_width, std::size_t bins) {
  std::vector<double> f(bins), s(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    const double a = bin_width * static_cast<double>(i);
    f[i] = beta.eval(a) * bin_width;
    s[i] = propagator(mu, a, a + bin_width);
  }
  return LeslieModel(std::move(f), std::move(s), bin_width);
}

std::vector<std::vector<double>> leslie_project(const LeslieModel& model,
                                                const std::vector<double>& n0,
                                                std::size_t steps) {
  const std::size_t m = model.bins();
  if (n0.size() != m)
    throw std::invalid_argument("leslie_project: dimension mismatch");

  std::vector<std::vector<double>> traj;
  traj.reserve(steps + 1);
  traj.push_back(n0);
  std::vector<double> cur = n0, next(m);
  for (std::size_t k = 0; k < steps; ++k) {
    double births = 0.0;
    for (std::size_t i = 0; i < m; ++i) births += model.fecundity[i] * cur[i];
    next[0] = births;
    for (std::size_t i = 1; i < m; ++i) next[i] = model.survival[i - 1] * cur[i - 1];
    // The last bin's survivors leave the modeled age range.
    cur = next;
    traj.push_back(cur);
  }
  return traj;
}

}  // namespace agekin
