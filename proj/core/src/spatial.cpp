#include "agekin/spatial.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "agekin/stats.hpp"

namespace agekin {

// ---------------------------------------------------------------------------
// PositionProfile

double PositionProfile::factor(double q) const {
  switch (kind) {
    case Kind::Uniform:
      return 1.0;
    case Kind::Gaussian: {
      const double z = (q - center) / width;
      return floor + std::exp(-0.5 * z * z);
    }
    case Kind::Tabulated: {
      if (tab_q.size() != tab_values.size() || tab_q.size() < 2)
        throw std::invalid_argument("PositionProfile: malformed table");
      if (q <= tab_q.front()) return tab_values.front();
      if (q >= tab_q.back()) return tab_values.back();
      const auto it = std::upper_bound(tab_q.begin(), tab_q.end(), q);
      const std::size_t i = static_cast<std::size_t>(it - tab_q.begin()) - 1;
      const double f = (q - tab_q[i]) / (tab_q[i + 1] - tab_q[i]);
      return tab_values[i] * (1.0 - f) + tab_values[i + 1] * f;
    }
  }
  return 1.0;
}

double PositionProfile::max_factor() const {
  switch (kind) {
    case Kind::Uniform:
      return 1.0;
    case Kind::Gaussian:
      return floor + 1.0;
    case Kind::Tabulated:
      return *std::max_element(tab_values.begin(), tab_values.end());
  }
  return 1.0;
}

// ---------------------------------------------------------------------------
// Estimator

void SpatialSlice::merge_from(const SpatialSlice& other) {
  if (count_by_n.size() < other.count_by_n.size())
    count_by_n.resize(other.count_by_n.size(), 0);
  for (std::size_t n = 0; n < other.count_by_n.size(); ++n)
    count_by_n[n] += other.count_by_n[n];
  if (age_pos_hist.size() < other.age_pos_hist.size())
    age_pos_hist.resize(other.age_pos_hist.size(), 0);
  for (std::size_t b = 0; b < other.age_pos_hist.size(); ++b)
    age_pos_hist[b] += other.age_pos_hist[b];
  if (window_power_sums.size() < other.window_power_sums.size())
    window_power_sums.resize(other.window_power_sums.size(), {0, 0, 0, 0});
  for (std::size_t w = 0; w < other.window_power_sums.size(); ++w)
    for (int p = 0; p < 4; ++p)
      window_power_sums[w][p] += other.window_power_sums[w][p];
  pos_sum += other.pos_sum;
  pos_sum_sq += other.pos_sum_sq;
  individuals += other.individuals;
  raw_positions.insert(raw_positions.end(), other.raw_positions.begin(),
                       other.raw_positions.end());
}

std::size_t SpatialEstimator::time_index(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) <= 1e-9) return i;
  throw std::invalid_argument("spatial estimator: t is not an output time");
}

std::vector<double> SpatialEstimator::n_marginal(double t) const {
  const auto& slice = slices[time_index(t)];
  std::vector<double> p(slice.count_by_n.size(), 0.0);
  if (paths == 0) return p;
  for (std::size_t n = 0; n < p.size(); ++n)
    p[n] = static_cast<double>(slice.count_by_n[n]) / static_cast<double>(paths);
  return p;
}

std::array<double, 2> SpatialEstimator::position_moments(double t) const {
  const auto& slice = slices[time_index(t)];
  if (slice.individuals < 2) return {0.0, 0.0};
  const double n = static_cast<double>(slice.individuals);
  const double mean = slice.pos_sum / n;
  const double var = (slice.pos_sum_sq - n * mean * mean) / (n - 1.0);
  return {mean, var};
}

WindowStats spatial_window_stats(const SpatialEstimator& est,
                                 const AgeWindow& window, double t) {
  const auto& slice = est.slices[est.time_index(t)];
  std::size_t w = est.windows.size();
  for (std::size_t i = 0; i < est.windows.size(); ++i) {
    if (std::abs(est.windows[i].lo - window.lo) <= 1e-12 &&
        ((std::isinf(est.windows[i].hi) && std::isinf(window.hi)) ||
         std::abs(est.windows[i].hi - window.hi) <= 1e-12)) {
      w = i;
      break;
    }
  }
  if (w == est.windows.size())
    throw std::invalid_argument("spatial_window_stats: window was not configured");

  WindowStats st;
  st.paths = est.paths;
  if (est.paths == 0 || slice.window_power_sums.size() <= w) return st;
  const auto& s = slice.window_power_sums[w];
  const double P = static_cast<double>(est.paths);
  const double m1 = static_cast<double>(s[0]) / P;
  const double m2 = static_cast<double>(s[1]) / P;
  const double m3 = static_cast<double>(s[2]) / P;
  const double m4 = static_cast<double>(s[3]) / P;
  st.mean = m1;
  const double var_pop = m2 - m1 * m1;
  st.variance = (est.paths > 1) ? var_pop * P / (P - 1.0) : 0.0;
  st.se_mean = std::sqrt(std::max(0.0, var_pop) / P);
  const double mu4 =
      m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1;
  const double se2 = (mu4 - var_pop * var_pop * (P - 3.0) / (P - 1.0)) / P;
  st.se_variance = std::sqrt(std::max(0.0, se2));
  return st;
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

void record_spatial(const SpatialPopulationState& state, const SpatialConfig& cfg,
                    SpatialSlice& slice, std::size_t n_age_bins,
                    std::size_t n_pos_bins) {
  const std::size_t n = state.tobs.size();
  if (slice.count_by_n.size() <= n) slice.count_by_n.resize(n + 1, 0);
  slice.count_by_n[n] += 1;

  if (slice.age_pos_hist.size() < n_age_bins * n_pos_bins)
    slice.age_pos_hist.resize(n_age_bins * n_pos_bins, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double age = state.clock - state.tobs[i];
    const double q = state.positions[i];
    const auto ba = static_cast<std::size_t>(age / cfg.age_bin_width);
    if (q >= cfg.pos_min && ba < n_age_bins) {
      const auto bq = static_cast<std::size_t>((q - cfg.pos_min) / cfg.pos_bin_width);
      if (bq < n_pos_bins) slice.age_pos_hist[ba * n_pos_bins + bq] += 1;
    }
    slice.pos_sum += q;
    slice.pos_sum_sq += q * q;
    slice.individuals += 1;
    if (cfg.keep_positions) slice.raw_positions.push_back(q);
  }

  if (slice.window_power_sums.size() < cfg.windows.size())
    slice.window_power_sums.resize(cfg.windows.size(), {0, 0, 0, 0});
  for (std::size_t w = 0; w < cfg.windows.size(); ++w) {
    std::int64_t c = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double age = state.clock - state.tobs[i];
      if (age >= cfg.windows[w].lo && age < cfg.windows[w].hi) ++c;
    }
    auto& s = slice.window_power_sums[w];
    s[0] += c;
    s[1] += c * c;
    s[2] += c * c * c;
    s[3] += c * c * c * c;
  }
}

void spatial_step(SpatialPopulationState& state, const SpatialConfig& cfg,
                  double dt, PathRng& rng) {
  const double t0 = state.clock;
  const double n = static_cast<double>(state.tobs.size());
  state.clock += dt;

  // Independent diffusion of every individual.
  const double sigma = std::sqrt(2.0 * cfg.diffusion * dt);
  for (double& q : state.positions) q += sigma * rng.normal();

  // Events against the start-of-step ages, post-move positions.
  std::vector<std::pair<std::size_t, bool>> events;  // (index, is_birth)
  for (std::size_t i = 0; i < state.tobs.size(); ++i) {
    const double age = t0 - state.tobs[i];
    const double q = state.positions[i];
    const double pb = cfg.birth.eval(age, q, n, t0) * dt;
    const double pd = cfg.death.eval(age, q, n, t0) * dt;
    const double u = rng.uniform();
    if (u < pb) {
      events.emplace_back(i, true);
    } else if (u < pb + pd) {
      events.emplace_back(i, false);
    }
  }
  for (auto it = events.rbegin(); it != events.rend(); ++it) {
    if (it->second) {
      // Newborn inherits the parent's position exactly.
      state.tobs.push_back(state.clock);
      state.positions.push_back(state.positions[it->first]);
    } else {
      state.tobs.erase(state.tobs.begin() + static_cast<std::ptrdiff_t>(it->first));
      state.positions.erase(state.positions.begin() +
                            static_cast<std::ptrdiff_t>(it->first));
    }
  }
}

SpatialEstimator make_empty(const SpatialConfig& cfg) {
  SpatialEstimator est;
  est.times = cfg.output_times;
  est.windows = cfg.windows;
  est.age_bin_width = cfg.age_bin_width;
  est.pos_bin_width = cfg.pos_bin_width;
  est.pos_min = cfg.pos_min;
  const double hist_max =
      cfg.age_hist_max > 0.0 ? cfg.age_hist_max : cfg.horizon + 5.0;
  est.n_age_bins = static_cast<std::size_t>(std::ceil(hist_max / cfg.age_bin_width));
  est.n_pos_bins = static_cast<std::size_t>(
      std::ceil((cfg.pos_max - cfg.pos_min) / cfg.pos_bin_width));
  est.paths = 0;
  est.slices.resize(cfg.output_times.size());
  return est;
}

void run_spatial_path(const SpatialConfig& cfg, std::uint64_t path_index,
                      SpatialEstimator& est) {
  PathRng rng = PathRng::for_path(cfg.seed, path_index);
  SpatialPopulationState state;
  state.clock = 0.0;
  for (double age : cfg.initial.sample(rng)) {
    state.tobs.push_back(-age);
    state.positions.push_back(cfg.initial_position);
  }

  std::size_t next_out = 0;
  while (next_out < cfg.output_times.size() && cfg.output_times[next_out] <= 0.0) {
    record_spatial(state, cfg, est.slices[next_out], est.n_age_bins, est.n_pos_bins);
    ++next_out;
  }
  for (; next_out < cfg.output_times.size(); ++next_out) {
    const double t_out = cfg.output_times[next_out];
    while (state.clock + cfg.dt <= t_out + 1e-12)
      spatial_step(state, cfg, cfg.dt, rng);
    if (state.clock < t_out - 1e-12)
      spatial_step(state, cfg, t_out - state.clock, rng);
    state.clock = t_out;
    record_spatial(state, cfg, est.slices[next_out], est.n_age_bins, est.n_pos_bins);
  }
}

}  // namespace

SpatialEstimator simulate_spatial(const SpatialConfig& config) {
  if (config.dimension != 1)
    throw std::invalid_argument("spatial: only 1-D space is implemented");
  if (config.diffusion < 0.0)
    throw std::invalid_argument("spatial: diffusion must be >= 0");
  if (config.dt <= 0.0) throw std::invalid_argument("spatial: dt must be > 0");
  if (config.output_times.empty() ||
      !std::is_sorted(config.output_times.begin(), config.output_times.end()) ||
      config.output_times.back() > config.horizon + 1e-12)
    throw std::invalid_argument("spatial: bad output times");

  SpatialEstimator est = make_empty(config);
  if (config.paths == 0) return est;

  const std::size_t n_blocks = std::min<std::size_t>(32, (config.paths + 63) / 64);
  const std::size_t block = (config.paths + n_blocks - 1) / n_blocks;
  std::vector<SpatialEstimator> partials(n_blocks);
  unsigned n_threads = config.threads
                           ? config.threads
                           : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(n_blocks));

  std::atomic<std::size_t> next_block{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    try {
      for (;;) {
        const std::size_t b = next_block.fetch_add(1);
        if (b >= n_blocks) return;
        SpatialEstimator part = make_empty(config);
        const std::size_t lo = b * block;
        const std::size_t hi = std::min(config.paths, lo + block);
        for (std::size_t p = lo; p < hi; ++p) {
          run_spatial_path(config, p, part);
          ++part.paths;
        }
        partials[b] = std::move(part);
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next_block.store(n_blocks);
    }
  };

  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& part : partials) {
    est.paths += part.paths;
    for (std::size_t i = 0; i < est.slices.size(); ++i)
      est.slices[i].merge_from(part.slices[i]);
  }
  return est;
}

HeatKernelComparison heat_kernel_check(const SpatialEstimator& est,
                                       const SpatialConfig& config, double t) {
  if (config.birth.age.max_over(0.0, config.horizon + 50.0) > 0.0)
    throw std::invalid_argument("heat_kernel_check: requires a birth-free run");
  if (config.death.profile.kind != PositionProfile::Kind::Uniform)
    throw std::invalid_argument(
        "heat_kernel_check: death rate must be position-independent");
  if (!config.keep_positions)
    throw std::invalid_argument("heat_kernel_check: run with keep_positions");

  double a0 = 0.0;
  if (config.initial.kind == InitialCondition::Kind::FixedAges &&
      config.initial.ages.size() == 1) {
    a0 = config.initial.ages[0];
  } else if (config.initial.kind != InitialCondition::Kind::AgeZero ||
             config.initial.count != 1) {
    throw std::invalid_argument("heat_kernel_check: requires a single founder");
  }

  const auto& slice = est.slices[est.time_index(t)];
  HeatKernelComparison out;
  out.survival_expected = propagator(config.death.age, a0, a0 + t);
  out.survivors = slice.raw_positions.size();
  out.survival_observed =
      static_cast<double>(out.survivors) / static_cast<double>(est.paths);

  const double sd = std::sqrt(2.0 * config.diffusion * t);
  const double q0 = config.initial_position;
  const auto normal_cdf = [q0, sd](double x) {
    return 0.5 * std::erfc(-(x - q0) / (sd * std::sqrt(2.0)));
  };
  const auto ks = ks_test(slice.raw_positions, normal_cdf);
  out.ks_statistic = ks.statistic;
  out.ks_p_value = ks.p_value;
  return out;
}

}  // namespace agekin
