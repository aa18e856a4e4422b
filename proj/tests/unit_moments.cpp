#include <doctest.h>

#include <cmath>
#include <random>

#include "agekin/master.hpp"
#include "agekin/moments.hpp"
#include "agekin/stirling.hpp"

using namespace agekin;

namespace {

GridFunction exponential_density(double lambda, double a_max, double dt) {
  const std::size_t n = static_cast<std::size_t>(std::round(a_max / dt)) + 1;
  GridFunction g = GridFunction::zeros(0.0, dt, n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lambda * std::exp(-lambda * g.node(i));
  return g;
}

struct YuleFurryFields {
  MomentField1 x1;
  MomentField2 x2;
};

YuleFurryFields solve_yule_furry(double lambda, double beta, double horizon,
                                 double dt) {
  auto g = exponential_density(lambda, 12.0, dt);
  MomentField1 x1 = solve_factorial_moment_k1(g, AgeRate::constant(beta),
                                              AgeRate::constant(0.0), horizon,
                                              {.dt = dt});
  MomentField2 x2 = solve_factorial_moment_k2(x1, AgeRate::constant(beta),
                                              AgeRate::constant(0.0), {},
                                              horizon, {.dt = dt});
  return {std::move(x1), std::move(x2)};
}

}  // namespace

TEST_CASE("stirling table self-checks and converts moments") {
  StirlingTable st(6);
  CHECK(st.self_test());
  CHECK(st.second(2, 1) == 1);
  CHECK(st.second(2, 2) == 1);
  CHECK(st.second(4, 2) == 7);
  CHECK(st.first(2, 1) == -1);
  CHECK(st.first(3, 1) == 2);
  CHECK(st.first(3, 2) == -3);

  // E[(N)_1]=3, E[(N)_2]=7 -> E[N^2] = 10.
  CHECK(st.factorial_to_raw({3.0, 7.0}, 2) == doctest::Approx(10.0));
  // k = 1 is the identity.
  CHECK(st.factorial_to_raw({3.0}, 1) == doctest::Approx(3.0));

  CHECK_THROWS_AS(st.second(7, 1), std::out_of_range);
}

TEST_CASE("stirling round trip is exact on integer moments") {
  StirlingTable st(4);
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> d(0, 30);
  for (int trial = 0; trial < 200; ++trial) {
    // Moments of a point mass at integer n are exactly representable.
    const int n = d(rng);
    std::vector<double> raw(4), falling(4);
    for (std::size_t k = 1; k <= 4; ++k) {
      double r = 1.0, fl = 1.0;
      for (std::size_t p = 0; p < k; ++p) {
        r *= n;
        fl *= n - static_cast<int>(p);
      }
      raw[k - 1] = r;
      falling[k - 1] = fl;
    }
    for (std::size_t k = 1; k <= 4; ++k) {
      CHECK(st.factorial_to_raw(falling, k) == doctest::Approx(raw[k - 1]));
      CHECK(st.raw_to_factorial(raw, k) == doctest::Approx(falling[k - 1]));
    }
  }
}

TEST_CASE("yule-furry closed forms: limits and regimes") {
  const double beta = 1.0, lambda = 2.0;
  for (double t : {0.5, 1.0, 2.0}) {
    auto v = yule_furry_closed(lambda, beta, 0.0,
                               std::numeric_limits<double>::infinity(), t);
    CHECK(v.mean == doctest::Approx(std::exp(beta * t)).epsilon(1e-12));
    CHECK(v.variance ==
          doctest::Approx(std::exp(beta * t) * (std::exp(beta * t) - 1.0))
              .epsilon(1e-12));
  }
  // Founder-only regime t < a < b.
  auto v = yule_furry_closed(lambda, beta, 2.0, 3.0, 1.0);
  CHECK(v.mean == doctest::Approx(std::exp(lambda * (1.0 - 2.0)) -
                                  std::exp(lambda * (1.0 - 3.0))));
  CHECK(v.variance == doctest::Approx(v.mean * (1.0 - v.mean)));
  // Single founder at time zero.
  auto v0 = yule_furry_closed(2.0, 1.0, 0.0,
                              std::numeric_limits<double>::infinity(), 0.0);
  CHECK(v0.mean == doctest::Approx(1.0));
  CHECK(v0.variance == doctest::Approx(0.0));

  CHECK_THROWS_AS(yule_furry_closed(2.0, 1.0, 3.0, 3.0, 1.0), std::domain_error);
}

TEST_CASE("k1 field matches the pure-birth closed forms") {
  const double lambda = 2.0, beta = 1.0, dt = 1e-3;
  auto g = exponential_density(lambda, 12.0, dt);
  auto x1 = solve_factorial_moment_k1(g, AgeRate::constant(beta),
                                      AgeRate::constant(0.0), 2.0, {.dt = dt});
  // t < a: initial-condition branch.
  CHECK(x1.value(1.5, 1.0) ==
        doctest::Approx(lambda * std::exp(-lambda * 0.5)).epsilon(1e-6));
  // t > a: fecundity branch.
  CHECK(x1.value(0.5, 1.0) ==
        doctest::Approx(beta * std::exp(beta * 0.5)).epsilon(2e-5));
  CHECK(x1.value(1.0, 2.0) ==
        doctest::Approx(beta * std::exp(beta * 1.0)).epsilon(2e-5));
}

TEST_CASE("k1 transport with uniform decay") {
  const double lambda = 2.0, mu = 0.7, dt = 1e-3;
  auto g = exponential_density(lambda, 12.0, dt);
  auto x1 = solve_factorial_moment_k1(g, AgeRate::constant(0.0),
                                      AgeRate::constant(mu), 1.0, {.dt = dt});
  for (double a : {1.5, 2.5}) {
    const double t = 1.0;
    CHECK(x1.value(a, t) ==
          doctest::Approx(lambda * std::exp(-lambda * (a - t)) *
                          std::exp(-mu * t)).epsilon(1e-9));
  }
}

TEST_CASE("k2 boundary matches the double-transform closed forms") {
  const double lambda = 2.0, beta = 1.0, dt = 0.005;
  auto f = solve_yule_furry(lambda, beta, 1.0, dt);
  // t < a region: the half-normalized boundary is (beta*lambda/2)
  // exp(-lambda a) exp((lambda+beta) t).
  for (double a : {1.2, 2.0}) {
    for (double t : {0.4, 0.9}) {
      if (t >= a) continue;
      const double expect = 0.5 * beta * lambda * std::exp(-lambda * a) *
                            std::exp((lambda + beta) * t);
      CHECK(f.x2.boundary_half(a, t) == doctest::Approx(expect).epsilon(3e-3));
    }
  }
  // t > a region: beta^2 exp(-beta a) exp(2 beta t).
  for (double a : {0.2, 0.5}) {
    for (double t : {0.6, 1.0}) {
      const double expect =
          beta * beta * std::exp(-beta * a) * std::exp(2.0 * beta * t);
      CHECK(f.x2.boundary_half(a, t) == doctest::Approx(expect).epsilon(3e-3));
    }
  }
}

TEST_CASE("k2 field reproduces the pure-birth closed forms") {
  const double lambda = 2.0, beta = 1.0, dt = 0.005;
  auto f = solve_yule_furry(lambda, beta, 1.0, dt);
  // t < a < b: no pairs yet.
  CHECK(f.x2.value(1.5, 2.0, 1.0) == 0.0);
  // a < t < b.
  {
    const double a = 0.5, b = 1.5, t = 1.0;
    const double expect = lambda * beta * std::exp(-lambda * (b - a)) *
                          std::exp((lambda + beta) * (t - a));
    CHECK(f.x2.value(a, b, t) == doctest::Approx(expect).epsilon(5e-3));
  }
  // a < b < t.
  {
    const double a = 0.25, b = 0.5, t = 1.0;
    const double expect = 2.0 * beta * beta * std::exp(-beta * (b - a)) *
                          std::exp(2.0 * beta * (t - a));
    CHECK(f.x2.value(a, b, t) == doctest::Approx(expect).epsilon(5e-3));
  }
  // Symmetry under argument swap is exact.
  CHECK(f.x2.value(0.25, 0.75, 1.0) == f.x2.value(0.75, 0.25, 1.0));
}

TEST_CASE("k2 with no births transports the initial pair density") {
  const double lambda = 2.0, mu = 0.5, dt = 0.01;
  auto g = exponential_density(lambda, 10.0, dt);
  auto x1 = solve_factorial_moment_k1(g, AgeRate::constant(0.0),
                                      AgeRate::constant(mu), 1.0, {.dt = dt});
  const auto init2 = [lambda](double a, double b) {
    return lambda * lambda * std::exp(-lambda * (a + b));
  };
  auto x2 = solve_factorial_moment_k2(x1, AgeRate::constant(0.0),
                                      AgeRate::constant(mu), init2, 1.0,
                                      {.dt = dt, .init2_age_max = 10.0});
  const double t = 1.0;
  for (double a : {1.5, 2.0}) {
    for (double b : {2.5, 3.0}) {
      const double expect = init2(a - t, b - t) * std::exp(-2.0 * mu * t);
      CHECK(x2.value(a, b, t) == doctest::Approx(expect).epsilon(1e-9));
    }
  }
}

TEST_CASE("k2 field satisfies the characteristic shift identity") {
  const double dt = 0.005;
  auto f = solve_yule_furry(2.0, 1.0, 1.0, dt);
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> node(0, 100);
  for (int trial = 0; trial < 50; ++trial) {
    double a = dt * node(rng), b = dt * node(rng), t = 1.0;
    const double m = std::min({a, b, t}) - dt * 2.0;
    if (m <= 0.0) continue;
    const double lhs = f.x2.value(a, b, t);
    const double rhs = f.x2.value(a - m, b - m, t - m);  // mu = 0: U factors are 1
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
  }
}

TEST_CASE("window mean and variance against the closed forms") {
  const double lambda = 2.0, beta = 1.0, dt = 0.002;
  auto f = solve_yule_furry(lambda, beta, 2.0, dt);
  const double inf = std::numeric_limits<double>::infinity();
  const struct { double a, b, t; } cases[] = {
      {0.5, 1.5, 1.0}, {0.0, 1.0, 1.0}, {2.0, inf, 1.0},
      {0.5, 1.5, 2.0}, {0.0, 1.0, 2.0}, {2.0, inf, 2.0},
  };
  for (const auto& c : cases) {
    const auto got = window_mean_var(f.x1, f.x2, c.a, c.b, c.t);
    const auto expect = yule_furry_closed(lambda, beta, c.a, c.b, c.t);
    CHECK(got.mean == doctest::Approx(expect.mean).epsilon(2e-4));
    CHECK(got.variance == doctest::Approx(expect.variance).epsilon(2e-4));
  }
}

TEST_CASE("vanishing pair field gives a bernoulli window variance") {
  const double lambda = 2.0, mu = 0.4, dt = 0.01;
  auto g = exponential_density(lambda, 10.0, dt);
  auto x1 = solve_factorial_moment_k1(g, AgeRate::constant(0.0),
                                      AgeRate::constant(mu), 1.0, {.dt = dt});
  auto x2 = solve_factorial_moment_k2(x1, AgeRate::constant(0.0),
                                      AgeRate::constant(mu), {}, 1.0, {.dt = dt});
  auto wm = window_mean_var(x1, x2, 0.5, 3.5, 1.0);
  CHECK(wm.variance == doctest::Approx(wm.mean * (1.0 - wm.mean)).epsilon(1e-9));
}

TEST_CASE("full-window moments agree with the master equation") {
  // Constant rates collapse the hierarchy onto the population-size master
  // equation; compare mean and variance at t = 1.
  const double beta = 1.0, mu = 0.3, lambda = 2.0, t = 1.0, dt = 2e-3;
  auto g = exponential_density(lambda, 13.0, dt);
  auto x1 = solve_factorial_moment_k1(g, AgeRate::constant(beta),
                                      AgeRate::constant(mu), t, {.dt = dt});
  auto x2 = solve_factorial_moment_k2(x1, AgeRate::constant(beta),
                                      AgeRate::constant(mu), {}, t, {.dt = dt});
  const double inf = std::numeric_limits<double>::infinity();
  auto wm = window_mean_var(x1, x2, 0.0, inf, t);

  auto traj = master_evolve([&](std::size_t) { return beta; },
                            [&](std::size_t) { return mu; },
                            MasterState::delta(1, 64), {t});
  const auto& st = traj.at_time(t);
  CHECK(wm.mean == doctest::Approx(st.mean()).epsilon(1e-4));
  CHECK(wm.variance == doctest::Approx(st.variance()).epsilon(1e-4));
}

TEST_CASE("k2 rejects mismatched grids and unbounded kernels") {
  auto g = exponential_density(2.0, 8.0, 0.01);
  auto x1 = solve_factorial_moment_k1(g, AgeRate::constant(1.0),
                                      AgeRate::constant(0.0), 1.0, {.dt = 0.01});
  CHECK_THROWS_AS(solve_factorial_moment_k2(x1, AgeRate::constant(1.0),
                                            AgeRate::constant(0.0), {}, 1.0,
                                            {.dt = 0.02}),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_factorial_moment_k2(x1, AgeRate::gamma_hazard(0.5, 1.0),
                                            AgeRate::constant(0.0), {}, 1.0,
                                            {.dt = 0.01}),
                  std::invalid_argument);
}

TEST_CASE("moment fields stay nonnegative") {
  const double dt = 0.01;
  auto f = solve_yule_furry(2.0, 1.0, 1.0, dt);
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> node(0, 99);
  for (int trial = 0; trial < 300; ++trial) {
    const double a = dt * node(rng), b = dt * node(rng), t = dt * node(rng);
    CHECK(f.x1.value(a, t) >= 0.0);
    CHECK(f.x2.value(a, b, t) >= 0.0);
  }
}
