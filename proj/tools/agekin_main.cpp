// Command-line surface: configuration-driven solvers and simulators with
// reproducible run manifests.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>

#include "agekin/celldiv.hpp"
#include "agekin/fission.hpp"
#include "agekin/manifest.hpp"
#include "agekin/master.hpp"
#include "agekin/mc.hpp"
#include "agekin/moments.hpp"
#include "agekin/mvf.hpp"
#include "agekin/spatial.hpp"
#include "agekin/validate.hpp"
#include "config.hpp"

namespace fs = std::filesystem;
using agekin::cli::ConfigError;
using agekin::cli::json;
using agekin::cli::parse_initial;
using agekin::cli::parse_profile;
using agekin::cli::parse_rate;
using agekin::cli::parse_windows;
using agekin::cli::require_keys;

namespace {

struct RunContext {
  std::string subcommand;
  fs::path outdir = "agekin_out";
  std::uint64_t seed = 1;
  unsigned threads = 0;
  int verbosity = 1;
  json config_echo;
  std::vector<agekin::ManifestEntry> artifacts;
  std::vector<std::pair<std::string, double>> settings;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  std::string out(const std::string& name) const {
    return (outdir / name).string();
  }
  void note(const std::string& path) {
    artifacts.push_back({fs::path(path).filename().string(),
                         agekin::file_content_hash(path)});
  }
  void log(const std::string& line) const {
    if (verbosity > 0) std::fprintf(stderr, "[agekin] %s\n", line.c_str());
  }
  void finish() {
    agekin::RunManifest m;
    m.subcommand = subcommand;
    m.seed = seed;
    m.rng = agekin::kRngDescription;
    m.threads = threads;
    m.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    m.config_echo_json = config_echo.is_null() ? "" : config_echo.dump();
    m.artifacts = artifacts;
    m.numeric_settings = settings;
    agekin::write_manifest(m, out("manifest.json"));
    log("manifest written to " + out("manifest.json"));
  }
};

json load_config(const std::string& path, const std::string& section,
                 RunContext& ctx) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  require_keys(root, {"run", section}, "config");
  if (root.contains("run")) {
    const auto& run = root.at("run");
    require_keys(run, {"seed", "outdir", "threads", "verbosity"}, "run");
    if (run.contains("seed")) ctx.seed = run.at("seed").get<std::uint64_t>();
    if (run.contains("outdir")) ctx.outdir = run.at("outdir").get<std::string>();
    if (run.contains("threads")) ctx.threads = run.at("threads").get<unsigned>();
    if (run.contains("verbosity")) ctx.verbosity = run.at("verbosity").get<int>();
  }
  if (!root.contains(section))
    throw ConfigError("config is missing the '" + section + "' section");
  ctx.config_echo = root;
  return root.at(section);
}

void apply_env_overrides(RunContext& ctx) {
  // Environment overrides exist for the output directory and thread count
  // only.
  if (const char* dir = std::getenv("AGEKIN_OUTDIR")) ctx.outdir = dir;
  if (const char* thr = std::getenv("AGEKIN_THREADS"))
    ctx.threads = static_cast<unsigned>(std::strtoul(thr, nullptr, 10));
}

agekin::GridFunction parse_density(const json& j, double dt,
                                   const std::string& where) {
  require_keys(j, {"kind", "rate", "shape", "scale", "age_max", "csv"}, where);
  const std::string kind = j.value("kind", "exponential");
  if (kind == "exponential") {
    const double rate = j.at("rate").get<double>();
    const double age_max = j.value("age_max", 12.0);
    const auto n = static_cast<std::size_t>(std::round(age_max / dt)) + 1;
    agekin::GridFunction g = agekin::GridFunction::zeros(0.0, dt, n);
    for (std::size_t i = 0; i < n; ++i)
      g[i] = rate * std::exp(-rate * g.node(i));
    return g;
  }
  if (kind == "gamma") {
    const double shape = j.at("shape").get<double>();
    const double rate = j.at("rate").get<double>();
    const double scale = j.value("scale", 1.0);
    const double age_max = j.value("age_max", 12.0);
    const auto n = static_cast<std::size_t>(std::round(age_max / dt)) + 1;
    agekin::GridFunction g = agekin::GridFunction::zeros(0.0, dt, n);
    const double lognorm = shape * std::log(rate) - std::lgamma(shape);
    for (std::size_t i = 1; i < n; ++i) {
      const double a = g.node(i);
      g[i] = scale * std::exp(lognorm + (shape - 1.0) * std::log(a) - rate * a);
    }
    return g;
  }
  if (kind == "tabulated_pdf") {
    auto [ages, pdf] =
        agekin::cli::read_two_column_csv(j.at("csv").get<std::string>());
    const double age_max = ages.back();
    const auto n = static_cast<std::size_t>(std::round(age_max / dt)) + 1;
    agekin::GridFunction g = agekin::GridFunction::zeros(0.0, dt, n);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = g.node(i);
      const auto it = std::upper_bound(ages.begin(), ages.end(), a);
      if (it == ages.begin()) {
        g[i] = pdf.front();
      } else if (it == ages.end()) {
        g[i] = pdf.back();
      } else {
        const auto k = static_cast<std::size_t>(it - ages.begin());
        const double f = (a - ages[k - 1]) / (ages[k] - ages[k - 1]);
        g[i] = pdf[k - 1] * (1.0 - f) + pdf[k] * f;
      }
    }
    return g;
  }
  throw ConfigError(where + ": unknown density kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_simulate(const json& cfg, RunContext& ctx) {
  require_keys(cfg, {"mode", "birth", "death", "initial", "horizon", "paths",
                     "stepper", "output_times", "age_bin_width", "age_hist_max",
                     "windows", "pair_histograms"},
               "simulate");
  agekin::SimConfig sim;
  const std::string mode = cfg.value("mode", "budding");
  if (mode == "budding") {
    sim.mode = agekin::BirthMode::Budding;
  } else if (mode == "fission") {
    sim.mode = agekin::BirthMode::Fission;
  } else {
    throw ConfigError("simulate: unknown mode '" + mode + "'");
  }
  if (cfg.contains("birth")) sim.birth = parse_rate(cfg.at("birth"), "birth");
  if (cfg.contains("death")) sim.death = parse_rate(cfg.at("death"), "death");
  if (cfg.contains("initial"))
    sim.initial = parse_initial(cfg.at("initial"), "initial");
  sim.horizon = cfg.at("horizon").get<double>();
  sim.paths = cfg.at("paths").get<std::size_t>();
  if (cfg.contains("stepper")) {
    const auto& st = cfg.at("stepper");
    require_keys(st, {"kind", "dt", "window"}, "stepper");
    const std::string kind = st.value("kind", "thinning");
    if (kind == "thinning") {
      sim.stepper.kind = agekin::StepperSpec::Kind::Thinning;
      sim.stepper.window = st.value("window", 0.25);
    } else if (kind == "fixed_dt") {
      sim.stepper.kind = agekin::StepperSpec::Kind::FixedDt;
      sim.stepper.dt = st.value("dt", 1e-3);
    } else {
      throw ConfigError("stepper: unknown kind '" + kind + "'");
    }
  }
  sim.output_times = cfg.at("output_times").get<std::vector<double>>();
  sim.age_bin_width = cfg.value("age_bin_width", 0.05);
  sim.age_hist_max = cfg.value("age_hist_max", 0.0);
  if (cfg.contains("windows"))
    sim.windows = parse_windows(cfg.at("windows"), "windows");
  sim.pair_histograms = cfg.value("pair_histograms", true);
  sim.seed = ctx.seed;
  sim.threads = ctx.threads;

  ctx.log("simulate: " + std::to_string(sim.paths) + " paths, horizon " +
          std::to_string(sim.horizon));
  const auto est = agekin::simulate_paths(sim);
  for (const auto& w : est.warnings) ctx.log("warning: " + w);

  {
    agekin::CsvWriter csv(ctx.out("n_marginal.csv"), {"t", "n", "probability"});
    for (double t : est.times) {
      const auto p = est.n_marginal(t);
      for (std::size_t n = 0; n < p.size(); ++n)
        csv.row({t, static_cast<double>(n), p[n]});
    }
    csv.close();
    ctx.note(csv.path());
  }
  {
    agekin::CsvWriter csv(ctx.out("age_density.csv"),
                          {"t", "n", "a", "density"});
    for (double t : est.times) {
      const auto& slice = est.slices[est.time_index(t)];
      for (const auto& [n, hist] : slice.age_hist_by_n) {
        const auto d = est.age_density(t, n);
        for (std::size_t b = 0; b < d.size(); ++b) {
          if (d[b] != 0.0)
            csv.row({t, static_cast<double>(n),
                     (static_cast<double>(b) + 0.5) * est.bin_width, d[b]});
        }
      }
    }
    csv.close();
    ctx.note(csv.path());
  }
  if (sim.pair_histograms) {
    agekin::CsvWriter csv(ctx.out("pair_density.csv"),
                          {"t", "a1", "a2", "density"});
    for (double t : est.times) {
      const auto d = est.pair_density(t);
      for (std::size_t i = 0; i < est.n_bins; ++i) {
        for (std::size_t j = 0; j < est.n_bins; ++j) {
          const double v = d[i * est.n_bins + j];
          if (v != 0.0)
            csv.row({t, (static_cast<double>(i) + 0.5) * est.bin_width,
                     (static_cast<double>(j) + 0.5) * est.bin_width, v});
        }
      }
    }
    csv.close();
    ctx.note(csv.path());
  }
  if (!est.windows.empty()) {
    agekin::CsvWriter csv(ctx.out("windows.csv"),
                          {"t", "a_lo", "a_hi", "mean", "var", "se"});
    for (double t : est.times) {
      for (const auto& w : est.windows) {
        const auto st = agekin::window_count_stats(est, w, t);
        csv.row({t, w.lo, w.hi, st.mean, st.variance, st.se_mean});
      }
    }
    csv.close();
    ctx.note(csv.path());
  }
  ctx.settings = {{"age_bin_width", sim.age_bin_width},
                  {"paths", static_cast<double>(sim.paths)}};
  return 0;
}

int cmd_solve_mvf(const json& cfg, RunContext& ctx) {
  require_keys(cfg, {"birth", "death", "initial_density", "horizon", "dt",
                     "age_max", "output_stride"},
               "solve-mvf");
  const double dt = cfg.value("dt", 1e-3);
  const auto birth = parse_rate(cfg.at("birth"), "birth");
  const auto death = parse_rate(cfg.at("death"), "death");
  const auto g = parse_density(cfg.at("initial_density"), dt, "initial_density");
  const double horizon = cfg.at("horizon").get<double>();
  agekin::MvfOptions opt;
  opt.dt = dt;
  opt.age_max = cfg.value("age_max", 0.0);
  const auto sol = agekin::solve_mvf(g, birth, death, horizon, opt);

  const auto stride = cfg.value("output_stride", std::size_t{10});
  {
    agekin::CsvWriter csv(ctx.out("rho.csv"), {"t", "a", "rho"});
    for (std::size_t j = 0; j < sol.density.nt(); j += stride)
      for (std::size_t i = 0; i < sol.density.na(); i += stride)
        csv.row(
            {sol.density.t_node(j), sol.density.a_node(i), sol.density(i, j)});
    csv.close();
    ctx.note(csv.path());
  }
  {
    agekin::CsvWriter csv(ctx.out("fecundity.csv"), {"t", "B"});
    for (std::size_t j = 0; j < sol.fecundity.size(); ++j)
      csv.row({sol.fecundity.node(j), sol.fecundity[j]});
    csv.close();
    ctx.note(csv.path());
  }
  ctx.settings = {{"dt", dt}};
  return 0;
}

int cmd_moments(const json& cfg, RunContext& ctx) {
  require_keys(cfg, {"birth", "death", "initial_density", "horizon", "dt",
                     "times", "windows", "x2", "output_stride"},
               "moments");
  const double dt = cfg.value("dt", 1e-3);
  const auto birth = parse_rate(cfg.at("birth"), "birth");
  const auto death = parse_rate(cfg.at("death"), "death");
  const auto g = parse_density(cfg.at("initial_density"), dt, "initial_density");
  const double horizon = cfg.at("horizon").get<double>();
  const auto times = cfg.at("times").get<std::vector<double>>();
  const auto windows = cfg.contains("windows")
                           ? parse_windows(cfg.at("windows"), "windows")
                           : std::vector<agekin::AgeWindow>{};
  const bool want_x2 = cfg.value("x2", true);
  const auto stride = cfg.value("output_stride", std::size_t{10});

  const auto x1 =
      agekin::solve_factorial_moment_k1(g, birth, death, horizon, {.dt = dt});
  std::optional<agekin::MomentField2> x2;
  if (want_x2) {
    agekin::MomentK2Options k2opt;
    k2opt.dt = dt;
    k2opt.threads = ctx.threads;
    x2 = agekin::solve_factorial_moment_k2(x1, birth, death, {}, horizon, k2opt);
  }

  {
    agekin::CsvWriter csv(ctx.out("x1.csv"), {"t", "a", "x1"});
    const auto na = static_cast<std::size_t>(std::round(x1.age_top() / dt)) + 1;
    for (double t : times)
      for (std::size_t i = 0; i < na; i += stride)
        csv.row({t, dt * static_cast<double>(i),
                 x1.value(dt * static_cast<double>(i), t)});
    csv.close();
    ctx.note(csv.path());
  }
  if (x2) {
    agekin::CsvWriter csv(ctx.out("x2.csv"), {"t", "a", "b", "x2"});
    const auto na =
        static_cast<std::size_t>(std::round((horizon + 2.0) / dt)) + 1;
    for (double t : times)
      for (std::size_t i = 0; i < na; i += stride)
        for (std::size_t j = i; j < na; j += stride)
          csv.row({t, dt * static_cast<double>(i), dt * static_cast<double>(j),
                   x2->value(dt * static_cast<double>(i),
                             dt * static_cast<double>(j), t)});
    csv.close();
    ctx.note(csv.path());
  }
  if (!windows.empty() && x2) {
    agekin::CsvWriter csv(ctx.out("windows.csv"),
                          {"t", "a_lo", "a_hi", "window_mean", "window_var"});
    for (double t : times)
      for (const auto& w : windows) {
        const auto wm = agekin::window_mean_var(x1, *x2, w.lo, w.hi, t);
        csv.row({t, w.lo, w.hi, wm.mean, wm.variance});
      }
    csv.close();
    ctx.note(csv.path());
  }
  ctx.settings = {{"dt", dt}};
  return 0;
}

int cmd_fission(const json& cfg, RunContext& ctx) {
  require_keys(cfg, {"alpha", "a2", "birth", "death", "horizon", "dt",
                     "output_stride", "xyt_times"},
               "fission");
  const double dt = cfg.value("dt", 1e-3);
  const double horizon = cfg.at("horizon").get<double>();
  agekin::AgeRate birth = agekin::AgeRate::constant(0.0);
  agekin::AgeRate death = agekin::AgeRate::constant(0.0);
  if (cfg.contains("alpha")) {
    const double alpha = cfg.at("alpha").get<double>();
    const double a2 = cfg.value("a2", 1.0);
    birth = agekin::AgeRate::gamma_hazard(alpha, a2);
    death = agekin::AgeRate::gamma_hazard(alpha, 1.0 - a2);
  } else {
    birth = parse_rate(cfg.at("birth"), "birth");
    death = parse_rate(cfg.at("death"), "death");
  }
  const auto sol = agekin::solve_fission_B(birth, death, horizon, dt);

  const auto stride = cfg.value("output_stride", std::size_t{10});
  {
    agekin::CsvWriter csv(ctx.out("fecundity.csv"), {"t", "B"});
    for (std::size_t j = 0; j < sol.fecundity().size(); j += stride)
      csv.row({sol.fecundity().node(j), sol.fecundity()[j]});
    csv.close();
    ctx.note(csv.path());
  }
  {
    agekin::CsvWriter csv(ctx.out("totals.csv"), {"t", "T_total"});
    for (std::size_t j = 0; j < sol.fecundity().size(); j += stride) {
      const double t = sol.fecundity().node(j);
      csv.row({t, sol.total_population(t)});
    }
    csv.close();
    ctx.note(csv.path());
  }
  {
    const auto xyt_times = cfg.contains("xyt_times")
                               ? cfg.at("xyt_times").get<std::vector<double>>()
                               : std::vector<double>{horizon};
    agekin::CsvWriter csv(ctx.out("xyt.csv"), {"x", "t", "X", "Y", "T"});
    for (double t : xyt_times) {
      const auto jt = sol.fecundity().index_of(t);
      for (std::size_t i = 0; i <= jt; i += stride) {
        const double x = sol.fecundity().node(i);
        const auto v = sol.eval_xyt(x, t);
        csv.row({x, t, v.x, v.y, v.t});
      }
    }
    csv.close();
    ctx.note(csv.path());
  }
  ctx.settings = {{"dt", dt}};
  return 0;
}

int cmd_celldiv(const json& cfg, RunContext& ctx) {
  require_keys(cfg, {"alpha", "t_max", "dt", "surface"}, "celldiv");
  const double alpha = cfg.at("alpha").get<double>();
  const double t_max = cfg.value("t_max", 5.0);
  const double dt = cfg.value("dt", 0.05);
  {
    agekin::CsvWriter csv(ctx.out("growth.csv"),
                          {"t", "B", "T", "markov", "galton_watson"});
    const auto n = static_cast<std::size_t>(std::round(t_max / dt));
    for (std::size_t i = 0; i <= n; ++i) {
      const double t = dt * static_cast<double>(i);
      csv.row(
          {t, agekin::B_closed_form(alpha, t), agekin::T_closed_form(alpha, t),
           agekin::reference_growth(agekin::ReferenceGrowth::Markov, t),
           agekin::reference_growth(agekin::ReferenceGrowth::GaltonWatson, t)});
    }
    csv.close();
    ctx.note(csv.path());
  }
  {
    std::size_t steps = 100;
    if (cfg.contains("surface")) {
      require_keys(cfg.at("surface"), {"steps"}, "surface");
      steps = cfg.at("surface").value("steps", std::size_t{100});
    }
    agekin::CsvWriter csv(ctx.out("age_time_surface.csv"), {"x", "t", "T"});
    for (std::size_t j = 1; j <= steps; ++j) {
      const double t =
          t_max * static_cast<double>(j) / static_cast<double>(steps);
      for (std::size_t i = 1; i <= j; ++i) {
        const double x =
            t_max * static_cast<double>(i) / static_cast<double>(steps);
        csv.row({x, t, agekin::age_time_distribution(alpha, x, t)});
      }
    }
    csv.close();
    ctx.note(csv.path());
  }
  ctx.settings = {{"alpha", alpha}, {"dt", dt}};
  return 0;
}

int cmd_spatial(const json& cfg, RunContext& ctx) {
  require_keys(cfg, {"diffusion", "birth", "death", "initial",
                     "initial_position", "horizon", "dt", "paths",
                     "output_times", "age_bin_width", "pos_bin_width",
                     "pos_min", "pos_max", "windows"},
               "spatial");
  agekin::SpatialConfig sp;
  sp.diffusion = cfg.value("diffusion", 0.0);
  if (cfg.contains("birth")) {
    const auto& b = cfg.at("birth");
    require_keys(b, {"age", "profile"}, "birth");
    sp.birth.age = parse_rate(b.at("age"), "birth.age");
    if (b.contains("profile"))
      sp.birth.profile = parse_profile(b.at("profile"), "birth.profile");
  }
  if (cfg.contains("death")) {
    const auto& d = cfg.at("death");
    require_keys(d, {"age", "profile"}, "death");
    sp.death.age = parse_rate(d.at("age"), "death.age");
    if (d.contains("profile"))
      sp.death.profile = parse_profile(d.at("profile"), "death.profile");
  }
  if (cfg.contains("initial"))
    sp.initial = parse_initial(cfg.at("initial"), "initial");
  sp.initial_position = cfg.value("initial_position", 0.0);
  sp.horizon = cfg.at("horizon").get<double>();
  sp.dt = cfg.value("dt", 1e-3);
  sp.paths = cfg.at("paths").get<std::size_t>();
  sp.output_times = cfg.at("output_times").get<std::vector<double>>();
  sp.age_bin_width = cfg.value("age_bin_width", 0.1);
  sp.pos_bin_width = cfg.value("pos_bin_width", 0.1);
  sp.pos_min = cfg.value("pos_min", -5.0);
  sp.pos_max = cfg.value("pos_max", 5.0);
  if (cfg.contains("windows"))
    sp.windows = parse_windows(cfg.at("windows"), "windows");
  sp.seed = ctx.seed;
  sp.threads = ctx.threads;

  const auto est = agekin::simulate_spatial(sp);
  {
    agekin::CsvWriter csv(ctx.out("age_pos_density.csv"),
                          {"t", "a_bin", "q_bin", "density"});
    const double norm_base = static_cast<double>(est.paths) *
                             est.age_bin_width * est.pos_bin_width;
    for (double t : est.times) {
      const auto& hist = est.slices[est.time_index(t)].age_pos_hist;
      for (std::size_t i = 0; i < est.n_age_bins; ++i)
        for (std::size_t j = 0; j < est.n_pos_bins; ++j) {
          const auto c = hist.empty() ? 0 : hist[i * est.n_pos_bins + j];
          if (c != 0)
            csv.row({t, (static_cast<double>(i) + 0.5) * est.age_bin_width,
                     est.pos_min +
                         (static_cast<double>(j) + 0.5) * est.pos_bin_width,
                     static_cast<double>(c) / norm_base});
        }
    }
    csv.close();
    ctx.note(csv.path());
  }
  {
    agekin::CsvWriter csv(ctx.out("n_marginal.csv"), {"t", "n", "probability"});
    for (double t : est.times) {
      const auto p = est.n_marginal(t);
      for (std::size_t n = 0; n < p.size(); ++n)
        csv.row({t, static_cast<double>(n), p[n]});
    }
    csv.close();
    ctx.note(csv.path());
  }
  ctx.settings = {{"dt", sp.dt}, {"diffusion", sp.diffusion}};
  return 0;
}

int cmd_validate(bool quick, RunContext& ctx) {
  agekin::ValidateOptions opt;
  opt.quick = quick;
  opt.seed = ctx.seed;
  opt.threads = ctx.threads;
  opt.outdir = ctx.outdir.string();
  const auto results = agekin::run_validation(opt);
  int failures = 0;
  for (const auto& r : results) {
    std::printf("[%s] %-34s (%6.2fs)  %s\n", r.passed ? "PASS" : "FAIL",
                r.name.c_str(), r.seconds, r.detail.c_str());
    if (!r.passed) ++failures;
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(results.size()) - failures, results.size());
  return failures == 0 ? 0 : 1;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"age-structured population kinetics: solvers and simulators"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> outdir_override;
  std::optional<unsigned> threads_override;
  int verbosity = 1;

  const auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* copt = sub->add_option("-c,--config", config_path, "JSON config file");
    if (config_required) copt->required();
    sub->add_option("--seed", seed_override, "override the run seed");
    sub->add_option("-o,--outdir", outdir_override, "output directory");
    sub->add_option("--threads", threads_override, "worker pool size (0 = auto)");
    sub->add_option("-v,--verbosity", verbosity, "0 silences progress lines");
  };

  auto* c_sim = app.add_subcommand("simulate", "event-based ensemble simulation");
  add_common(c_sim, true);
  auto* c_mvf = app.add_subcommand("solve-mvf", "mean-field transport solver");
  add_common(c_mvf, true);
  auto* c_mom = app.add_subcommand("moments", "factorial-moment fields and windows");
  add_common(c_mom, true);
  auto* c_fis = app.add_subcommand("fission", "fission-death mean-field solver");
  add_common(c_fis, true);

  auto* c_cel = app.add_subcommand("celldiv", "gamma division-time closed forms");
  add_common(c_cel, false);
  std::optional<double> cel_alpha, cel_t;
  c_cel->add_option("--alpha", cel_alpha, "shape parameter (direct evaluation)");
  c_cel->add_option("--t", cel_t, "time (direct evaluation)");

  auto* c_spa = app.add_subcommand("spatial", "diffusing-population simulation");
  add_common(c_spa, true);

  auto* c_val = app.add_subcommand("validate", "cross-layer reconciliation suite");
  add_common(c_val, false);
  bool quick = false;
  c_val->add_flag("--quick", quick, "exponential-identity subset (< 10 s)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  RunContext ctx;
  ctx.verbosity = verbosity;

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    ctx.subcommand = name;

    // Direct evaluation path: no config, no artifacts.
    if (name == "celldiv" && cel_alpha && cel_t) {
      const double b = agekin::B_closed_form(*cel_alpha, *cel_t);
      const double t = agekin::T_closed_form(*cel_alpha, *cel_t);
      std::printf("B=%.6f T=%.6f\n", b, t);
      return 0;
    }

    json cfg;
    if (!config_path.empty()) {
      cfg = load_config(config_path, name, ctx);
    } else if (name != "validate") {
      throw ConfigError(name + ": --config is required");
    }
    if (seed_override) ctx.seed = *seed_override;
    if (outdir_override) ctx.outdir = *outdir_override;
    if (threads_override) ctx.threads = *threads_override;
    apply_env_overrides(ctx);
    std::filesystem::create_directories(ctx.outdir);

    int code = 0;
    if (name == "simulate") {
      code = cmd_simulate(cfg, ctx);
    } else if (name == "solve-mvf") {
      code = cmd_solve_mvf(cfg, ctx);
    } else if (name == "moments") {
      code = cmd_moments(cfg, ctx);
    } else if (name == "fission") {
      code = cmd_fission(cfg, ctx);
    } else if (name == "celldiv") {
      code = cmd_celldiv(cfg, ctx);
    } else if (name == "spatial") {
      code = cmd_spatial(cfg, ctx);
    } else if (name == "validate") {
      code = cmd_validate(quick, ctx);
    }
    ctx.finish();
    return code;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int main(int argc, char** argv) { return run(argc, argv); }
