#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "agekin/mc.hpp"
#include "agekin/rates.hpp"
#include "agekin/rng.hpp"

namespace agekin {

/// Multiplicative position dependence of a rate.
struct PositionProfile {
  enum class Kind { Uniform, Gaussian, Tabulated };
  Kind kind = Kind::Uniform;
  double center = 0.0, width = 1.0, floor = 0.0;  // Gaussian: floor + exp(...)
  std::vector<double> tab_q, tab_values;

  double factor(double q) const;
  double max_factor() const;
};

struct SpatialRate {
  AgeRate age = AgeRate::constant(0.0);
  PositionProfile profile;

  double eval(double a, double q, double n, double t) const {
    return age.eval(a, n, t) * profile.factor(q);
  }
};

/// TOBs and 1-D positions in matching index order; newborns take the
/// parent's position exactly.
struct SpatialPopulationState {
  std::vector<double> tobs;
  std::vector<double> positions;
  double clock = 0.0;
};

struct SpatialConfig {
  unsigned dimension = 1;  // reserved; only 1-D space is implemented
  double diffusion = 0.0;  // length^2 / time
  SpatialRate birth;
  SpatialRate death;
  InitialCondition initial;
  double initial_position = 0.0;
  double horizon = 1.0;
  std::size_t paths = 1000;
  std::uint64_t seed = 1;
  double dt = 1e-3;  // shared between motion and events
  std::vector<double> output_times;
  double age_bin_width = 0.1;
  double age_hist_max = 0.0;  // 0: horizon + 5
  double pos_bin_width = 0.1;
  double pos_min = -5.0, pos_max = 5.0;
  std::vector<AgeWindow> windows;
  bool keep_positions = false;  // retain raw positions per output time
  unsigned threads = 0;
};

struct SpatialSlice {
  std::vector<std::int64_t> count_by_n;
  std::vector<std::int64_t> age_pos_hist;  // row-major age bin x pos bin
  std::vector<std::array<std::int64_t, 4>> window_power_sums;
  double pos_sum = 0.0, pos_sum_sq = 0.0;  // over individuals
  std::int64_t individuals = 0;
  std::vector<double> raw_positions;  // only when keep_positions

  void merge_from(const SpatialSlice& other);
};

struct SpatialEstimator {
  std::vector<double> times;
  std::vector<AgeWindow> windows;
  double age_bin_width = 0.1, pos_bin_width = 0.1, pos_min = -5.0;
  std::size_t n_age_bins = 0, n_pos_bins = 0;
  std::size_t paths = 0;
  std::vector<SpatialSlice> slices;

  std::size_t time_index(double t) const;
  std::vector<double> n_marginal(double t) const;
  /// Mean and unbiased variance of individual positions at t.
  std::array<double, 2> position_moments(double t) const;
};

SpatialEstimator simulate_spatial(const SpatialConfig& config);

/// Exact per-path age-window statistics, mirroring the non-spatial engine.
WindowStats spatial_window_stats(const SpatialEstimator& est,
                                 const AgeWindow& window, double t);

struct HeatKernelComparison {
  double survival_expected = 0.0;
  double survival_observed = 0.0;
  double ks_statistic = 0.0;
  double ks_p_value = 0.0;
  std::size_t survivors = 0;
};

/// Single-founder, no-birth check: survivor positions against the heat
/// kernel N(q0, 2Dt) (Kolmogorov-Smirnov) and the survival fraction against
/// the age propagator. Requires keep_positions and a position-independent
/// death profile.
HeatKernelComparison heat_kernel_check(const SpatialEstimator& est,
                                       const SpatialConfig& config, double t);

}  // namespace agekin
