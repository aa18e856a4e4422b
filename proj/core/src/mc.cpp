#include "agekin/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace agekin {

// ---------------------------------------------------------------------------
// PopulationState

void PopulationState::collect_ages(std::vector<double>& out) const {
  out.clear();
  for (double tob : singles) out.push_back(clock - tob);
  for (double tob : doublets) {
    out.push_back(clock - tob);
    out.push_back(clock - tob);
  }
}

namespace {
void check_transition(const PopulationState& s, std::size_t m0, std::size_t n0,
                      long dm, long dn) {
  if (s.singles.size() != m0 + dm || s.doublets.size() != n0 + dn)
    throw std::logic_error("PopulationState: bookkeeping violation");
}
}  // namespace

void PopulationState::apply_budding_birth() {
  if (mode != BirthMode::Budding)
    throw std::logic_error("budding birth in fission mode");
  singles.push_back(clock);
}

void PopulationState::apply_single_death(std::size_t i) {
  const std::size_t m0 = singles.size(), n0 = doublets.size();
  singles.erase(singles.begin() + static_cast<std::ptrdiff_t>(i));
  check_transition(*this, m0, n0, -1, 0);
}

void PopulationState::apply_single_fission(std::size_t i) {
  if (mode != BirthMode::Fission)
    throw std::logic_error("fission event in budding mode");
  const std::size_t m0 = singles.size(), n0 = doublets.size();
  singles.erase(singles.begin() + static_cast<std::ptrdiff_t>(i));
  doublets.push_back(clock);
  check_transition(*this, m0, n0, -1, +1);
}

void PopulationState::apply_doublet_event(std::size_t i, bool fission) {
  if (mode != BirthMode::Fission)
    throw std::logic_error("doublet event in budding mode");
  const std::size_t m0 = singles.size(), n0 = doublets.size();
  const double tob = doublets[i];
  doublets.erase(doublets.begin() + static_cast<std::ptrdiff_t>(i));
  singles.push_back(tob);  // the surviving twin
  if (fission) {
    doublets.push_back(clock);
    check_transition(*this, m0, n0, +1, 0);
  } else {
    check_transition(*this, m0, n0, +1, -1);
  }
}

// ---------------------------------------------------------------------------
// InitialCondition

std::vector<double> InitialCondition::sample(PathRng& rng) const {
  std::vector<double> out;
  switch (kind) {
    case Kind::AgeZero:
      out.assign(count, 0.0);
      break;
    case Kind::FixedAges:
      out = ages;
      break;
    case Kind::ExponentialAge:
      out.reserve(count);
      for (std::size_t i = 0; i < count; ++i) out.push_back(rng.exponential(rate));
      break;
    case Kind::GammaAge:
      out.reserve(count);
      for (std::size_t i = 0; i < count; ++i) out.push_back(rng.gamma(shape) / rate);
      break;
    case Kind::TabulatedPdf: {
      if (tab_ages.size() != tab_pdf.size() || tab_ages.size() < 2)
        throw std::invalid_argument("initial condition: malformed pdf table");
      // Inverse-cdf over the trapezoid cdf of the tabulated density.
      std::vector<double> cdf(tab_ages.size(), 0.0);
      for (std::size_t i = 1; i < tab_ages.size(); ++i)
        cdf[i] = cdf[i - 1] + 0.5 * (tab_pdf[i] + tab_pdf[i - 1]) *
                                  (tab_ages[i] - tab_ages[i - 1]);
      const double total = cdf.back();
      if (!(total > 0.0))
        throw std::invalid_argument("initial condition: pdf has no mass");
      out.reserve(count);
      for (std::size_t i = 0; i < count; ++i) {
        const double u = rng.uniform() * total;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t j = static_cast<std::size_t>(it - cdf.begin());
        if (j == 0) j = 1;
        if (j >= cdf.size()) j = cdf.size() - 1;
        const double seg = cdf[j] - cdf[j - 1];
        const double f = seg > 0.0 ? (u - cdf[j - 1]) / seg : 0.0;
        out.push_back(tab_ages[j - 1] + f * (tab_ages[j] - tab_ages[j - 1]));
      }
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Steppers

void step_fixed(PopulationState& state, const AgeRate& birth,
                const AgeRate& death, double dt, PathRng& rng) {
  const double t0 = state.clock;
  const double n = static_cast<double>(state.total_count());
  state.clock += dt;

  // Collect events against the start-of-step state, then apply.
  std::vector<std::pair<std::size_t, bool>> single_events;  // (index, is_birth)
  std::vector<std::pair<std::size_t, bool>> doublet_events;
  for (std::size_t i = 0; i < state.singles.size(); ++i) {
    const double age = t0 - state.singles[i];
    const double pb = birth.eval(age, n, t0) * dt;
    const double pd = death.eval(age, n, t0) * dt;
    const double u = rng.uniform();
    if (u < pb) {
      single_events.emplace_back(i, true);
    } else if (u < pb + pd) {
      single_events.emplace_back(i, false);
    }
  }
  for (std::size_t i = 0; i < state.doublets.size(); ++i) {
    const double age = t0 - state.doublets[i];
    const double pb = 2.0 * birth.eval(age, n, t0) * dt;
    const double pd = 2.0 * death.eval(age, n, t0) * dt;
    const double u = rng.uniform();
    if (u < pb) {
      doublet_events.emplace_back(i, true);
    } else if (u < pb + pd) {
      doublet_events.emplace_back(i, false);
    }
  }

  for (auto it = doublet_events.rbegin(); it != doublet_events.rend(); ++it)
    state.apply_doublet_event(it->first, it->second);
  for (auto it = single_events.rbegin(); it != single_events.rend(); ++it) {
    if (it->second) {
      if (state.mode == BirthMode::Budding) {
        state.apply_budding_birth();
      } else {
        state.apply_single_fission(it->first);
      }
    } else {
      state.apply_single_death(it->first);
    }
  }
}

void advance_thinning(PopulationState& state, const AgeRate& birth,
                      const AgeRate& death, double window, double t_target,
                      PathRng& rng) {
  if (window <= 0.0) throw std::invalid_argument("thinning: window must be > 0");
  std::vector<double> bound;
  while (state.clock < t_target) {
    const double w_end = std::min(state.clock + window, t_target);
    const double span = w_end - state.clock;

    // Per-individual majorants over the remaining window (doublets carry
    // twice the hazard). max_over bounds every population size too.
    bound.clear();
    double total_bound = 0.0;
    for (double tob : state.singles) {
      const double age = state.clock - tob;
      const double m =
          birth.max_over(age, age + span) + death.max_over(age, age + span);
      bound.push_back(m);
      total_bound += m;
    }
    for (double tob : state.doublets) {
      const double age = state.clock - tob;
      const double m =
          2.0 * (birth.max_over(age, age + span) + death.max_over(age, age + span));
      bound.push_back(m);
      total_bound += m;
    }

    if (total_bound <= 0.0) {
      state.clock = w_end;
      continue;
    }

    bool population_changed = false;
    while (state.clock < w_end) {
      const double step = rng.exponential(total_bound);
      if (state.clock + step >= w_end) {
        state.clock = w_end;
        break;
      }
      state.clock += step;

      // Select the proposing individual by its share of the bound.
      double pick = rng.uniform() * total_bound;
      std::size_t idx = 0;
      while (idx + 1 < bound.size() && pick >= bound[idx]) {
        pick -= bound[idx];
        ++idx;
      }

      const bool is_doublet = idx >= state.singles.size();
      const std::size_t k = is_doublet ? idx - state.singles.size() : idx;
      const double age =
          is_doublet ? state.age_of_doublet(k) : state.age_of_single(k);
      const double n = static_cast<double>(state.total_count());
      const double mult = is_doublet ? 2.0 : 1.0;
      const double rb = mult * birth.eval(age, n, state.clock);
      const double rd = mult * death.eval(age, n, state.clock);
      if (rb + rd > bound[idx] * (1.0 + 1e-9))
        throw std::runtime_error("thinning: true rate exceeded its majorant");

      const double u = rng.uniform() * bound[idx];
      if (u < rb) {
        if (is_doublet) {
          state.apply_doublet_event(k, true);
        } else if (state.mode == BirthMode::Budding) {
          state.apply_budding_birth();
        } else {
          state.apply_single_fission(k);
        }
        population_changed = true;
      } else if (u < rb + rd) {
        if (is_doublet) {
          state.apply_doublet_event(k, false);
        } else {
          state.apply_single_death(k);
        }
        population_changed = true;
      }
      // Rejections leave the state unchanged and the bounds valid.
      if (population_changed) break;
    }
    // A changed population invalidates the per-individual bounds; recompute.
  }
}

// ---------------------------------------------------------------------------
// Estimator

void TimeSlice::merge_from(const TimeSlice& other) {
  if (count_by_n.size() < other.count_by_n.size())
    count_by_n.resize(other.count_by_n.size(), 0);
  for (std::size_t n = 0; n < other.count_by_n.size(); ++n)
    count_by_n[n] += other.count_by_n[n];
  for (const auto& [n, hist] : other.age_hist_by_n) {
    auto& mine = age_hist_by_n[n];
    if (mine.size() < hist.size()) mine.resize(hist.size(), 0);
    for (std::size_t b = 0; b < hist.size(); ++b) mine[b] += hist[b];
  }
  if (pair_hist.size() < other.pair_hist.size())
    pair_hist.resize(other.pair_hist.size(), 0.0);
  for (std::size_t b = 0; b < other.pair_hist.size(); ++b)
    pair_hist[b] += other.pair_hist[b];
  if (window_power_sums.size() < other.window_power_sums.size())
    window_power_sums.resize(other.window_power_sums.size(), {0, 0, 0, 0});
  for (std::size_t w = 0; w < other.window_power_sums.size(); ++w)
    for (int p = 0; p < 4; ++p)
      window_power_sums[w][p] += other.window_power_sums[w][p];
}

std::size_t EnsembleEstimator::time_index(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) <= 1e-9) return i;
  throw std::invalid_argument("estimator: t is not an output time");
}

std::vector<double> EnsembleEstimator::n_marginal(double t) const {
  const auto& slice = slices[time_index(t)];
  std::vector<double> p(slice.count_by_n.size(), 0.0);
  if (paths == 0) return p;
  for (std::size_t n = 0; n < p.size(); ++n)
    p[n] = static_cast<double>(slice.count_by_n[n]) / static_cast<double>(paths);
  return p;
}

std::vector<double> EnsembleEstimator::age_density(double t, std::size_t n) const {
  const auto& slice = slices[time_index(t)];
  std::vector<double> d(n_bins, 0.0);
  if (paths == 0 || n == 0) return d;
  const auto it = slice.age_hist_by_n.find(n);
  if (it == slice.age_hist_by_n.end()) return d;
  const double norm =
      static_cast<double>(paths) * static_cast<double>(n) * bin_width;
  for (std::size_t b = 0; b < std::min(n_bins, it->second.size()); ++b)
    d[b] = static_cast<double>(it->second[b]) / norm;
  return d;
}

std::vector<double> EnsembleEstimator::pair_density(double t) const {
  const auto& slice = slices[time_index(t)];
  std::vector<double> d(n_bins * n_bins, 0.0);
  if (paths == 0 || slice.pair_hist.empty()) return d;
  const double norm = static_cast<double>(paths) * bin_width * bin_width;
  for (std::size_t b = 0; b < std::min(d.size(), slice.pair_hist.size()); ++b)
    d[b] = slice.pair_hist[b] / norm;
  return d;
}

void EnsembleEstimator::merge_from(const EnsembleEstimator& other) {
  paths += other.paths;
  for (std::size_t i = 0; i < slices.size(); ++i)
    slices[i].merge_from(other.slices[i]);
  for (const auto& w : other.warnings) warnings.push_back(w);
}

WindowStats window_count_stats(const EnsembleEstimator& est,
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
    throw std::invalid_argument("window_count_stats: window was not configured");

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
  // Moment-based standard error of the sample variance.
  const double mu4 =
      m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1;
  const double se2 = (mu4 - var_pop * var_pop * (P - 3.0) / (P - 1.0)) / P;
  st.se_variance = std::sqrt(std::max(0.0, se2));
  return st;
}

// ---------------------------------------------------------------------------
// Path driver

namespace {

void record_path(const PopulationState& state, const SimConfig& cfg,
                 TimeSlice& slice, std::size_t n_bins,
                 std::vector<double>& ages_scratch) {
  const std::size_t n = state.total_count();
  if (slice.count_by_n.size() <= n) slice.count_by_n.resize(n + 1, 0);
  slice.count_by_n[n] += 1;

  state.collect_ages(ages_scratch);
  const auto& ages = ages_scratch;

  if (n > 0) {
    auto& hist = slice.age_hist_by_n[n];
    if (hist.size() < n_bins) hist.resize(n_bins, 0);
    for (double a : ages) {
      const auto b = static_cast<std::size_t>(a / cfg.age_bin_width);
      if (b < n_bins) hist[b] += 1;
    }
  }

  if (cfg.pair_histograms && n >= 2) {
    if (slice.pair_hist.size() < n_bins * n_bins)
      slice.pair_hist.resize(n_bins * n_bins, 0.0);
    const double w = 1.0 / (static_cast<double>(n) * static_cast<double>(n - 1));
    for (std::size_t i = 0; i < ages.size(); ++i) {
      const auto bi = static_cast<std::size_t>(ages[i] / cfg.age_bin_width);
      if (bi >= n_bins) continue;
      for (std::size_t j = 0; j < ages.size(); ++j) {
        if (i == j) continue;
        const auto bj = static_cast<std::size_t>(ages[j] / cfg.age_bin_width);
        if (bj < n_bins) slice.pair_hist[bi * n_bins + bj] += w;
      }
    }
  }

  if (slice.window_power_sums.size() < cfg.windows.size())
    slice.window_power_sums.resize(cfg.windows.size(), {0, 0, 0, 0});
  for (std::size_t w = 0; w < cfg.windows.size(); ++w) {
    std::int64_t c = 0;
    for (double a : ages)
      if (a >= cfg.windows[w].lo && a < cfg.windows[w].hi) ++c;
    auto& s = slice.window_power_sums[w];
    s[0] += c;
    s[1] += c * c;
    s[2] += c * c * c;
    s[3] += c * c * c * c;
  }
}

EnsembleEstimator make_empty(const SimConfig& cfg) {
  EnsembleEstimator est;
  est.times = cfg.output_times;
  est.windows = cfg.windows;
  est.bin_width = cfg.age_bin_width;
  const double hist_max =
      cfg.age_hist_max > 0.0 ? cfg.age_hist_max : cfg.horizon + 5.0;
  est.n_bins = static_cast<std::size_t>(std::ceil(hist_max / cfg.age_bin_width));
  est.paths = 0;
  est.slices.resize(cfg.output_times.size());
  return est;
}

void run_one_path(const SimConfig& cfg, std::uint64_t path_index,
                  EnsembleEstimator& est, std::vector<double>& ages_scratch) {
  PathRng rng = PathRng::for_path(cfg.seed, path_index);
  PopulationState state;
  state.mode = cfg.mode;
  state.clock = 0.0;
  for (double age : cfg.initial.sample(rng)) state.singles.push_back(-age);

  std::size_t next_out = 0;
  while (next_out < cfg.output_times.size() && cfg.output_times[next_out] <= 0.0) {
    record_path(state, cfg, est.slices[next_out], est.n_bins, ages_scratch);
    ++next_out;
  }

  for (; next_out < cfg.output_times.size(); ++next_out) {
    const double t_out = cfg.output_times[next_out];
    if (cfg.stepper.kind == StepperSpec::Kind::Thinning) {
      advance_thinning(state, cfg.birth, cfg.death, cfg.stepper.window, t_out, rng);
    } else {
      const double dt = cfg.stepper.dt;
      while (state.clock + dt <= t_out + 1e-12)
        step_fixed(state, cfg.birth, cfg.death, dt, rng);
      if (state.clock < t_out - 1e-12)
        step_fixed(state, cfg.birth, cfg.death, t_out - state.clock, rng);
      state.clock = t_out;
    }
    record_path(state, cfg, est.slices[next_out], est.n_bins, ages_scratch);
  }
}

void validate_config(const SimConfig& cfg, EnsembleEstimator& est) {
  if (cfg.horizon <= 0.0) throw std::invalid_argument("simulate: horizon must be > 0");
  if (cfg.age_bin_width <= 0.0)
    throw std::invalid_argument("simulate: bin width must be > 0");
  if (!std::is_sorted(cfg.output_times.begin(), cfg.output_times.end()))
    throw std::invalid_argument("simulate: output times must be sorted");
  if (cfg.output_times.empty())
    throw std::invalid_argument("simulate: need at least one output time");
  if (cfg.output_times.back() > cfg.horizon + 1e-12)
    throw std::invalid_argument("simulate: output time beyond horizon");
  for (const auto& w : cfg.windows)
    if (w.hi < w.lo) throw std::invalid_argument("simulate: window hi < lo");
  if (cfg.stepper.kind == StepperSpec::Kind::FixedDt) {
    if (cfg.stepper.dt <= 0.0) throw std::invalid_argument("simulate: dt must be > 0");
    // Rough event-probability check against the initial population.
    PathRng probe(42);
    const auto ages = cfg.initial.sample(probe);
    const double top_age =
        ages.empty() ? 0.0 : *std::max_element(ages.begin(), ages.end());
    const double per_cap = cfg.birth.max_over(0.0, top_age + cfg.horizon) +
                           cfg.death.max_over(0.0, top_age + cfg.horizon);
    const double p = cfg.stepper.dt * per_cap * static_cast<double>(ages.size());
    if (p > 0.1)
      est.warnings.push_back(
          "fixed-dt stepper: initial total event probability per step ~" +
          std::to_string(p) + " exceeds 0.1; results carry O(dt) bias");
  } else if (cfg.stepper.window <= 0.0) {
    throw std::invalid_argument("simulate: thinning window must be > 0");
  }
}

}  // namespace

EnsembleEstimator simulate_paths(const SimConfig& config) {
  EnsembleEstimator est = make_empty(config);
  validate_config(config, est);
  if (config.paths == 0) return est;

  // Fixed-size blocks keep the merge order independent of scheduling.
  const std::size_t n_blocks = std::min<std::size_t>(32, (config.paths + 63) / 64);
  const std::size_t block = (config.paths + n_blocks - 1) / n_blocks;

  std::vector<EnsembleEstimator> partials(n_blocks);
  unsigned n_threads = config.threads
                           ? config.threads
                           : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(n_blocks));

  std::atomic<std::size_t> next_block{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    std::vector<double> scratch;
    try {
      for (;;) {
        const std::size_t b = next_block.fetch_add(1);
        if (b >= n_blocks) return;
        EnsembleEstimator part = make_empty(config);
        const std::size_t lo = b * block;
        const std::size_t hi = std::min(config.paths, lo + block);
        for (std::size_t p = lo; p < hi; ++p) {
          run_one_path(config, p, part, scratch);
          ++part.paths;
        }
        partials[b] = std::move(part);
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next_block.store(n_blocks);  // drain remaining work
    }
  };

  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  // Stepper errors invalidate the whole ensemble; no partial results leak.
  if (failure) std::rethrow_exception(failure);

  for (auto& part : partials) est.merge_from(part);
  return est;
}

}  // namespace agekin
