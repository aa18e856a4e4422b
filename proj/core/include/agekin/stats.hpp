#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace agekin {

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  std::size_t merged_bins = 0;
};

/// Goodness-of-fit of observed counts against expected probabilities.
/// Low-expectation bins (below min_expected) are pooled into the tail.
ChiSquareResult chi_square_gof(const std::vector<std::int64_t>& observed,
                               const std::vector<double>& expected_probs,
                               double min_expected = 5.0);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against a continuous cdf, with the
/// finite-sample abscissa correction on the asymptotic tail series.
KsResult ks_test(std::vector<double> samples,
                 const std::function<double(double)>& cdf);

/// Asymptotic KS tail probability Q(lambda) = 2 sum (-1)^{k-1} e^{-2k^2 l^2}.
double ks_tail(double lambda);

}  // namespace agekin
