#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>

#include "agekin/celldiv.hpp"
#include "agekin/fission.hpp"
#include "agekin/laplace.hpp"
#include "agekin/mc.hpp"
#include "agekin/moments.hpp"
#include "agekin/volterra.hpp"

using namespace agekin;

namespace {

GridFunction exp_density(double lambda, double a_max, double dt) {
  const auto n = static_cast<std::size_t>(std::round(a_max / dt)) + 1;
  GridFunction g = GridFunction::zeros(0.0, dt, n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lambda * std::exp(-lambda * g.node(i));
  return g;
}

void BM_VolterraConv(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  GridFunction f = GridFunction::zeros(0.0, 1e-3, n);
  std::vector<double> k(n);
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = std::exp(-f.node(i));
    k[i] = 2.0 * f[i];
  }
  for (auto _ : state) {
    auto b = solve_volterra_conv(k, f);
    benchmark::DoNotOptimize(b);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_VolterraConv)->RangeMultiplier(2)->Range(512, 8192)->Complexity();

void BM_PairBoundarySolve(benchmark::State& state) {
  const double dt = 1.0 / static_cast<double>(state.range(0));
  auto g = exp_density(2.0, 8.0, dt);
  auto x1 = solve_factorial_moment_k1(g, AgeRate::constant(1.0),
                                      AgeRate::constant(0.0), 1.0, {.dt = dt});
  for (auto _ : state) {
    auto x2 = solve_factorial_moment_k2(x1, AgeRate::constant(1.0),
                                        AgeRate::constant(0.0), {}, 1.0,
                                        {.dt = dt});
    benchmark::DoNotOptimize(x2);
  }
}
BENCHMARK(BM_PairBoundarySolve)->Arg(100)->Arg(200)->Arg(400);

void BM_ThinningPaths(benchmark::State& state) {
  SimConfig cfg;
  cfg.mode = BirthMode::Budding;
  cfg.birth = AgeRate::constant(1.0);
  cfg.initial.kind = InitialCondition::Kind::ExponentialAge;
  cfg.initial.rate = 2.0;
  cfg.horizon = 2.0;
  cfg.output_times = {2.0};
  cfg.paths = static_cast<std::size_t>(state.range(0));
  cfg.seed = 7;
  cfg.threads = 1;
  cfg.pair_histograms = false;
  for (auto _ : state) {
    auto est = simulate_paths(cfg);
    benchmark::DoNotOptimize(est);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ThinningPaths)->Arg(256)->Arg(1024);

void BM_TalbotInversion(benchmark::State& state) {
  const double alpha = 3.0;
  const double shift = celldiv_abscissa(alpha);
  for (auto _ : state) {
    auto v = numerical_laplace_inverse(
        [alpha](std::complex<long double> s) { return T_transform(alpha, s); },
        2.0, shift, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_TalbotInversion)->Arg(32)->Arg(64);

void BM_BromwichClosedForm(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(B_closed_form(1.5, 2.0));
    benchmark::DoNotOptimize(T_closed_form(10.0, 2.0));
  }
}
BENCHMARK(BM_BromwichClosedForm);

void BM_FissionMeanField(benchmark::State& state) {
  for (auto _ : state) {
    auto f = solve_fission_B(AgeRate::gamma_hazard(3.0, 1.0),
                             AgeRate::constant(0.0), 5.0, 1e-3);
    benchmark::DoNotOptimize(f);
  }
}
BENCHMARK(BM_FissionMeanField);

}  // namespace

BENCHMARK_MAIN();
