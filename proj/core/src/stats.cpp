#include "agekin/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace agekin {

ChiSquareResult chi_square_gof(const std::vector<std::int64_t>& observed,
                               const std::vector<double>& expected_probs,
                               double min_expected) {
  if (expected_probs.empty())
    throw std::invalid_argument("chi_square_gof: empty expectation");
  std::int64_t total = 0;
  for (auto c : observed) total += c;
  if (total <= 0) throw std::invalid_argument("chi_square_gof: no observations");

  const std::size_t n = std::max(observed.size(), expected_probs.size());
  const auto obs_at = [&](std::size_t i) {
    return i < observed.size() ? static_cast<double>(observed[i]) : 0.0;
  };
  const auto exp_at = [&](std::size_t i) {
    return i < expected_probs.size()
               ? expected_probs[i] * static_cast<double>(total)
               : 0.0;
  };

  // Pool bins until each pooled cell has enough expectation; remainders
  // join the last cell.
  std::vector<double> obs_cells, exp_cells;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    o_acc += obs_at(i);
    e_acc += exp_at(i);
    if (e_acc >= min_expected) {
      obs_cells.push_back(o_acc);
      exp_cells.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  ChiSquareResult res;
  if (o_acc > 0.0 || e_acc > 0.0) {
    if (exp_cells.empty()) {
      obs_cells.push_back(o_acc);
      exp_cells.push_back(e_acc);
    } else {
      obs_cells.back() += o_acc;
      exp_cells.back() += e_acc;
      res.merged_bins = 1;
    }
  }
  if (obs_cells.size() < 2)
    throw std::invalid_argument("chi_square_gof: not enough populated cells");

  double stat = 0.0;
  for (std::size_t i = 0; i < obs_cells.size(); ++i) {
    if (exp_cells[i] <= 0.0) {
      if (obs_cells[i] > 0.0) stat = std::numeric_limits<double>::infinity();
      continue;
    }
    const double d = obs_cells[i] - exp_cells[i];
    stat += d * d / exp_cells[i];
  }
  res.statistic = stat;
  res.dof = obs_cells.size() - 1;
  if (std::isinf(stat)) {
    res.p_value = 0.0;
  } else {
    boost::math::chi_squared dist(static_cast<double>(res.dof));
    res.p_value = boost::math::cdf(boost::math::complement(dist, stat));
  }
  return res;
}

double ks_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 101; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> samples,
                 const std::function<double(double)>& cdf) {
  if (samples.size() < 5)
    throw std::invalid_argument("ks_test: too few samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  KsResult r;
  r.statistic = d;
  const double sq = std::sqrt(n);
  r.p_value = ks_tail((sq + 0.12 + 0.11 / sq) * d);
  return r;
}

}  // namespace agekin
