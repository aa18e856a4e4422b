#include <doctest.h>

#include <cmath>

#include "agekin/leslie.hpp"
#include "agekin/master.hpp"
#include "agekin/mvf.hpp"
#include "agekin/volterra.hpp"

using namespace agekin;

namespace {

GridFunction exponential_density(double lambda, double a_max, double dt) {
  const std::size_t n = static_cast<std::size_t>(std::round(a_max / dt)) + 1;
  GridFunction g = GridFunction::zeros(0.0, dt, n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lambda * std::exp(-lambda * g.node(i));
  return g;
}

double binom_pmf(int n, int k, double p) {
  double logc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  return std::exp(logc + k * std::log(p) + (n - k) * std::log1p(-p));
}

}  // namespace

TEST_CASE("volterra: zero kernel returns the forcing") {
  GridFunction f(0.0, 0.1, std::vector<double>{1.0, 2.0, 3.0, 4.0});
  auto b = solve_volterra([](double, double) { return 0.0; }, f);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(b[i] == f[i]);
}

TEST_CASE("volterra: unit kernel and forcing solve to exp(t)") {
  const double dt = 1e-3;
  GridFunction f = GridFunction::zeros(0.0, dt, 1001);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 1.0;
  auto b = solve_volterra([](double, double) { return 1.0; }, f);
  double worst = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double truth = std::exp(f.node(i));
    worst = std::max(worst, std::abs(b[i] - truth) / truth);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("volterra: renewal with exponential waiting times grows as exp(t)") {
  // kernel 2 g(t-s), forcing g(t), g exponential with unit mean.
  const double dt = 1e-3;
  GridFunction f = GridFunction::zeros(0.0, dt, 2001);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(-f.node(i));
  auto b = solve_volterra(
      [](double t, double s) { return 2.0 * std::exp(-(t - s)); }, f);
  for (double t : {0.5, 1.0, 2.0}) {
    const std::size_t i = f.index_of(t);
    CHECK(b[i] == doctest::Approx(std::exp(t)).epsilon(1e-5));
  }
}

TEST_CASE("volterra: halving dt shrinks the error at second order") {
  const auto run = [](double dt) {
    const std::size_t n = static_cast<std::size_t>(std::round(1.0 / dt)) + 1;
    GridFunction f = GridFunction::zeros(0.0, dt, n);
    for (std::size_t i = 0; i < n; ++i) f[i] = 1.0;
    auto b = solve_volterra([](double, double) { return 1.0; }, f);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(b[i] - std::exp(f.node(i))));
    return worst;
  };
  const double e1 = run(2e-3), e2 = run(1e-3);
  CHECK(e1 / e2 >= 3.5);
}

TEST_CASE("mvf: no rates means pure transport of the initial density") {
  auto g = exponential_density(2.0, 10.0, 0.01);
  auto sol = solve_mvf(g, AgeRate::constant(0.0), AgeRate::constant(0.0), 1.0,
                       {.dt = 0.01});
  for (double t : {0.0, 0.5, 1.0}) {
    CHECK(sol.fecundity[sol.fecundity.index_of(t)] == 0.0);
    for (double a : {1.5, 2.0, 4.0})
      CHECK(sol.value(a, t) ==
            doctest::Approx(2.0 * std::exp(-2.0 * (a - t))).epsilon(1e-9));
  }
}

TEST_CASE("mvf: pure birth reproduces the exponential fecundity law") {
  auto g = exponential_density(2.0, 12.0, 1e-3);
  auto sol = solve_mvf(g, AgeRate::constant(1.0), AgeRate::constant(0.0), 2.0,
                       {.dt = 1e-3});
  for (double t : {0.5, 1.0, 2.0}) {
    const std::size_t j = sol.fecundity.index_of(t);
    CHECK(sol.fecundity[j] == doctest::Approx(std::exp(t)).epsilon(2e-5));
    CHECK(sol.value(0.0, t) == doctest::Approx(std::exp(t)).epsilon(2e-5));
  }
  CHECK(sol.total(2.0) == doctest::Approx(std::exp(2.0)).epsilon(2e-5));
}

TEST_CASE("mvf: equal birth and death rates conserve the population") {
  auto g = exponential_density(1.0, 14.0, 2e-3);
  auto mvf = solve_mvf(g, AgeRate::constant(0.6), AgeRate::constant(0.6), 5.0,
                       {.dt = 2e-3, .materialize_density = false});
  const double n0 = mvf.total(0.0);
  for (double t : {1.0, 2.5, 5.0})
    CHECK(mvf.total(t) == doctest::Approx(n0).epsilon(1e-6));
}

TEST_CASE("mvf: rejects bad input") {
  auto g = exponential_density(2.0, 5.0, 0.01);
  g[3] = -1.0;
  CHECK_THROWS_AS(solve_mvf(g, AgeRate::constant(1.0), AgeRate::constant(0.0),
                            1.0, {.dt = 0.01}),
                  std::domain_error);
  auto cap = AgeRate::constant(1.0).with_capacity(CapacityModifier::constant(5));
  auto g2 = exponential_density(2.0, 5.0, 0.01);
  CHECK_THROWS_AS(solve_mvf(g2, cap, AgeRate::constant(0.0), 1.0, {.dt = 0.01}),
                  std::invalid_argument);
}

TEST_CASE("master: pure death thins a cohort binomially") {
  const double mu = 0.4, t = 1.0;
  auto traj = master_evolve([](std::size_t) { return 0.0; },
                            [&](std::size_t) { return mu; },
                            MasterState::delta(10, 24), {t});
  const auto& s = traj.at_time(t);
  const double p = std::exp(-mu * t);
  CHECK(s.mean() == doctest::Approx(10.0 * p).epsilon(1e-8));
  for (int k = 0; k <= 10; ++k)
    CHECK(s.pmf[k] == doctest::Approx(binom_pmf(10, k, p)).epsilon(1e-7));
  CHECK(s.mass() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_FALSE(traj.truncation_warning);
}

TEST_CASE("master: pure birth mean grows exponentially") {
  const double beta = 1.0;
  auto traj = master_evolve([&](std::size_t) { return beta; },
                            [](std::size_t) { return 0.0; },
                            MasterState::delta(1, 64), {0.5, 1.0});
  CHECK(traj.at_time(1.0).mean() == doctest::Approx(std::exp(1.0)).epsilon(1e-7));
  CHECK(traj.at_time(0.5).mean() == doctest::Approx(std::exp(0.5)).epsilon(1e-7));
  CHECK(traj.at_time(1.0).mass() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("master: no rates, no change") {
  auto init = MasterState::delta(3, 8);
  auto traj = master_evolve([](std::size_t) { return 0.0; },
                            [](std::size_t) { return 0.0; }, init, {2.0});
  for (std::size_t n = 0; n < init.pmf.size(); ++n)
    CHECK(traj.at_time(2.0).pmf[n] == doctest::Approx(init.pmf[n]));
}

TEST_CASE("master: truncation leakage is flagged") {
  auto traj = master_evolve([](std::size_t) { return 2.0; },
                            [](std::size_t) { return 0.0; },
                            MasterState::delta(1, 4), {2.0});
  CHECK(traj.truncation_warning);
  CHECK(traj.max_boundary_mass > 1e-9);
}

TEST_CASE("leslie: degenerate models behave as expected") {
  LeslieModel shift({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, 0.5);
  auto traj = leslie_project(shift, {1.0, 2.0, 3.0}, 1);
  CHECK(traj[1][0] == 0.0);
  CHECK(traj[1][1] == 1.0);
  CHECK(traj[1][2] == 2.0);

  LeslieModel doubling({2.0, 0.0}, {0.0, 0.0}, 1.0);
  auto traj2 = leslie_project(doubling, {1.0, 0.0}, 3);
  CHECK(traj2[3][0] == 8.0);
}

TEST_CASE("leslie: discretized pure-birth model tracks the continuum total") {
  const double da = 0.01;
  const std::size_t bins = static_cast<std::size_t>(std::round(14.0 / da));
  auto model = LeslieModel::from_rates(AgeRate::constant(1.0),
                                       AgeRate::constant(0.0), da, bins);
  // Initial bin contents from the lambda = 2 exponential density.
  std::vector<double> n0(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    const double a = da * static_cast<double>(i);
    n0[i] = std::exp(-2.0 * a) - std::exp(-2.0 * (a + da));
  }
  auto traj = leslie_project(model, n0, 100);
  double total = 0.0;
  for (double v : traj[100]) total += v;
  CHECK(std::abs(total - std::exp(1.0)) / std::exp(1.0) < 0.02);
}

TEST_CASE("leslie: shape mismatch throws") {
  LeslieModel m({1.0, 1.0}, {0.5, 0.5}, 1.0);
  CHECK_THROWS_AS(leslie_project(m, {1.0, 2.0, 3.0}, 1), std::invalid_argument);
}

TEST_CASE("mvf rejects a weakly singular birth kernel") {
  auto g = exponential_density(2.0, 5.0, 0.01);
  CHECK_THROWS_AS(solve_mvf(g, AgeRate::gamma_hazard(0.5, 1.0),
                            AgeRate::constant(0.0), 1.0, {.dt = 0.01}),
                  std::invalid_argument);
}

TEST_CASE("leslie totals converge to the continuum as bins shrink") {
  const auto total_error = [](double da) {
    const std::size_t bins = static_cast<std::size_t>(std::round(14.0 / da));
    auto model = LeslieModel::from_rates(AgeRate::constant(1.0),
                                         AgeRate::constant(0.0), da, bins);
    std::vector<double> n0(bins);
    for (std::size_t i = 0; i < bins; ++i) {
      const double a = da * static_cast<double>(i);
      n0[i] = std::exp(-2.0 * a) - std::exp(-2.0 * (a + da));
    }
    const auto steps = static_cast<std::size_t>(std::round(1.0 / da));
    auto traj = leslie_project(model, n0, steps);
    double total = 0.0;
    for (double v : traj[steps]) total += v;
    return std::abs(total - std::exp(1.0));
  };
  const double coarse = total_error(0.02), fine = total_error(0.01);
  CHECK(fine < coarse);
  CHECK(coarse / fine > 1.5);  // roughly first order in the bin width
}
