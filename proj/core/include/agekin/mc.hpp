#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "agekin/rates.hpp"
#include "agekin/rng.hpp"

namespace agekin {

enum class BirthMode { Budding, Fission };

/// One realization's full age chart, stored as times of birth. Founders have
/// negative TOBs. In fission mode a doublet entry stands for two individuals
/// of identical age; every event keeps the (singlet, doublet) bookkeeping
/// consistent and throws on violation.
struct PopulationState {
  BirthMode mode = BirthMode::Budding;
  std::vector<double> singles;   // TOBs
  std::vector<double> doublets;  // TOBs, fission mode only
  double clock = 0.0;

  std::size_t total_count() const { return singles.size() + 2 * doublets.size(); }
  double age_of_single(std::size_t i) const { return clock - singles[i]; }
  double age_of_doublet(std::size_t i) const { return clock - doublets[i]; }
  /// All current ages (doublets contribute twice).
  void collect_ages(std::vector<double>& out) const;

  void apply_budding_birth();
  void apply_single_death(std::size_t i);
  void apply_single_fission(std::size_t i);
  /// One member of doublet i dies or fissions; the twin becomes a singlet.
  void apply_doublet_event(std::size_t i, bool fission);
};

struct InitialCondition {
  enum class Kind { AgeZero, FixedAges, ExponentialAge, GammaAge, TabulatedPdf };
  Kind kind = Kind::AgeZero;
  std::size_t count = 1;
  double rate = 1.0;             // ExponentialAge, GammaAge
  double shape = 1.0;            // GammaAge
  std::vector<double> ages;      // FixedAges
  std::vector<double> tab_ages;  // TabulatedPdf (inverse-cdf sampled)
  std::vector<double> tab_pdf;

  std::vector<double> sample(PathRng& rng) const;
};

struct StepperSpec {
  enum class Kind { FixedDt, Thinning };
  Kind kind = Kind::Thinning;
  double dt = 1e-3;      // FixedDt
  double window = 0.25;  // Thinning majorant lookahead
};

struct AgeWindow {
  double lo = 0.0;
  double hi = 0.0;  // may be +inf; counts use [lo, hi)
};

struct SimConfig {
  BirthMode mode = BirthMode::Budding;
  AgeRate birth = AgeRate::constant(0.0);
  AgeRate death = AgeRate::constant(0.0);
  InitialCondition initial;
  double horizon = 1.0;
  std::size_t paths = 1000;
  std::uint64_t seed = 1;
  StepperSpec stepper;
  std::vector<double> output_times;
  double age_bin_width = 0.05;
  double age_hist_max = 0.0;  // 0: horizon + 5
  std::vector<AgeWindow> windows;
  bool pair_histograms = true;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Accumulated ensemble statistics at one output time. Counts are integers
/// so merging is exact and order-free; the pair histogram carries per-path
/// 1/(n(n-1)) weights and is merged in fixed block order.
struct TimeSlice {
  std::vector<std::int64_t> count_by_n;
  std::map<std::size_t, std::vector<std::int64_t>> age_hist_by_n;
  std::vector<double> pair_hist;  // row-major n_bins x n_bins
  std::vector<std::array<std::int64_t, 4>> window_power_sums;  // S1..S4

  void merge_from(const TimeSlice& other);
};

struct WindowStats {
  double mean = 0.0;
  double variance = 0.0;     // unbiased sample variance
  double se_mean = 0.0;
  double se_variance = 0.0;  // moment-based standard error of the variance
  std::size_t paths = 0;
};

struct EnsembleEstimator {
  std::vector<double> times;
  std::vector<AgeWindow> windows;
  double bin_width = 0.05;
  std::size_t n_bins = 0;
  std::size_t paths = 0;
  std::vector<TimeSlice> slices;  // one per output time
  std::vector<std::string> warnings;

  std::size_t time_index(double t) const;
  /// P(N = n) estimates at an output time.
  std::vector<double> n_marginal(double t) const;
  /// Age-density estimate for population size n (per unit age).
  std::vector<double> age_density(double t, std::size_t n) const;
  /// Population-summed two-point density (per unit age squared).
  std::vector<double> pair_density(double t) const;

  void merge_from(const EnsembleEstimator& other);
};

/// Exact per-path window-count statistics (not binned).
WindowStats window_count_stats(const EnsembleEstimator& est,
                               const AgeWindow& window, double t);

/// One fixed-dt step: the clock advances by dt and each individual triggers
/// at most one event with probability rate*dt, rates read at start of step.
void step_fixed(PopulationState& state, const AgeRate& birth,
                const AgeRate& death, double dt, PathRng& rng);

/// Statistically exact advance to t_target by thinning against windowed
/// per-individual majorants. Throws if a true rate exceeds its majorant.
void advance_thinning(PopulationState& state, const AgeRate& birth,
                      const AgeRate& death, double window, double t_target,
                      PathRng& rng);

/// Runs config.paths independent realizations on a block-deterministic
/// worker pool; identical (config, seed) give bit-identical estimators for
/// any thread count.
EnsembleEstimator simulate_paths(const SimConfig& config);

}  // namespace agekin
