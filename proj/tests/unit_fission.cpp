#include <doctest.h>

#include <cmath>

#include "agekin/fission.hpp"

using namespace agekin;

namespace {

AgeRate fission_rate(double alpha, double a2) {
  return AgeRate::gamma_hazard(alpha, a2);
}
AgeRate death_rate(double alpha, double a2) {
  return AgeRate::gamma_hazard(alpha, 1.0 - a2);
}

}  // namespace

TEST_CASE("exponential division times: newborn flux grows as exp(t)") {
  auto f = solve_fission_B(fission_rate(1.0, 1.0), death_rate(1.0, 1.0), 2.0);
  for (double t : {0.5, 1.0, 2.0}) {
    CHECK(f.fecundity()[f.fecundity().index_of(t)] ==
          doctest::Approx(std::exp(t)).epsilon(2e-5));
    CHECK(f.total_population(t) == doctest::Approx(std::exp(t)).epsilon(2e-5));
  }
}

TEST_CASE("no fission means no newborns") {
  auto f = solve_fission_B(AgeRate::constant(0.0), AgeRate::constant(0.4), 2.0,
                           0.01);
  for (std::size_t i = 0; i < f.fecundity().size(); ++i)
    CHECK(f.fecundity()[i] == 0.0);
}

TEST_CASE("pure-death events: total is the survival function") {
  const double alpha = 3.0;
  auto f = solve_fission_B(fission_rate(alpha, 0.0), death_rate(alpha, 0.0), 3.0);
  GammaBranching gb(alpha, 0.0);
  for (double t : {0.5, 1.5, 3.0})
    CHECK(f.total_population(t) == doctest::Approx(gb.survival(t)).epsilon(1e-8));
}

TEST_CASE("density-founder solve reduces to the point founder as the density sharpens") {
  // A narrow founder density just below x = 0 approximates the age-zero atom.
  const double width = 0.02, dx = 1e-3;
  const std::size_t n = static_cast<std::size_t>(std::round(width / dx)) + 1;
  GridFunction x0(-width, dx, std::vector<double>(n, 1.0 / width));
  GridFunction y0 = GridFunction::zeros(-width, dx, n);
  auto beta = fission_rate(1.0, 1.0);
  auto mu = death_rate(1.0, 1.0);
  auto narrow = solve_fission_B(beta, mu, x0, y0, 1.5, 1e-3);
  auto point = solve_fission_B(beta, mu, 1.5, 1e-3);
  CHECK(narrow.fecundity()[narrow.fecundity().index_of(1.5)] ==
        doctest::Approx(point.fecundity()[point.fecundity().index_of(1.5)])
            .epsilon(0.02));
}

TEST_CASE("newborn edge values: X vanishes, Y equals the flux") {
  auto f = solve_fission_B(fission_rate(3.0, 0.8), death_rate(3.0, 0.8), 2.0);
  for (double x : {0.5, 1.0, 2.0}) {
    const auto v = f.eval_xyt(x, x);
    CHECK(v.x == 0.0);
    CHECK(v.y == doctest::Approx(f.fecundity()[f.fecundity().index_of(x)]));
    CHECK(v.t == doctest::Approx(2.0 * v.y));
  }
}

TEST_CASE("doublet density decays with the squared propagator") {
  auto f = solve_fission_B(fission_rate(2.0, 0.9), death_rate(2.0, 0.9), 2.0);
  GammaBranching gb(2.0, 0.9);
  const double x = 0.75, t = 1.75;
  const double u = gb.survival(t - x);  // U(x;x,t) = 1 - G(t-x)
  CHECK(f.propagator_u(x, x, t) == doctest::Approx(u).epsilon(1e-10));
  const auto v = f.eval_xyt(x, t);
  const double b = f.fecundity()[f.fecundity().index_of(x)];
  CHECK(v.y == doctest::Approx(b * u * u).epsilon(1e-12));
  CHECK(v.x == doctest::Approx(2.0 * b * u * (1.0 - u)).epsilon(1e-12));
  CHECK(v.t == doctest::Approx(v.x + 2.0 * v.y).epsilon(1e-15));
}

TEST_CASE("alpha=1 age-time density matches the closed form") {
  auto f = solve_fission_B(fission_rate(1.0, 1.0), death_rate(1.0, 1.0), 2.0);
  for (double x : {0.25, 0.75, 1.5}) {
    const double t = 2.0;
    const auto v = f.eval_xyt(x, t);
    CHECK(v.t ==
          doctest::Approx(2.0 * std::exp(x) * std::exp(-(t - x))).epsilon(1e-4));
  }
}

TEST_CASE("doublet density obeys its decay law along the grid") {
  auto f = solve_fission_B(fission_rate(3.0, 1.0), death_rate(3.0, 1.0), 2.0);
  GammaBranching gb(3.0, 1.0);
  const double x = 0.5;
  const auto residual = [&](double h) {
    const double t = 1.25;
    const double dy =
        (f.eval_xyt(x, t + h).y - f.eval_xyt(x, t - h).y) / (2.0 * h);
    return std::abs(dy + 2.0 * gb.hazard(t - x) * f.eval_xyt(x, t).y);
  };
  // Central difference: the residual shrinks at second order.
  const double r1 = residual(0.02), r2 = residual(0.01);
  CHECK(r1 / r2 > 3.0);
  CHECK(r2 < 1e-3);
}

TEST_CASE("solved flux is self-consistent in the renewal identity") {
  auto beta = fission_rate(2.0, 0.8);
  auto mu = death_rate(2.0, 0.8);
  auto f = solve_fission_B(beta, mu, 2.0);
  const auto& b = f.fecundity();
  for (double t : {0.5, 1.0, 2.0}) {
    const std::size_t j = b.index_of(t);
    std::vector<double> integrand(j + 1);
    for (std::size_t i = 0; i <= j; ++i) {
      const double x = b.node(i);
      integrand[i] = b[i] * f.propagator_u(x, x, t) * beta.eval(t - x);
    }
    const double rhs = 2.0 * trapezoid(integrand, b.dt()) +
                       f.propagator_u(0.0, 0.0, t) * beta.eval(t);
    CHECK(b[j] == doctest::Approx(rhs).epsilon(1e-6));
  }
}

TEST_CASE("branching-mean laws for special progeny probabilities") {
  // Certain division: exp(t). Critical: constant 1. No division: survival.
  auto t1 = bellman_harris_mean(GammaBranching(1.0, 1.0), 2.0);
  auto thalf = bellman_harris_mean(GammaBranching(2.0, 0.5), 2.0);
  auto t0 = bellman_harris_mean(GammaBranching(2.0, 0.0), 2.0);
  GammaBranching g2(2.0, 0.0);
  for (double t : {0.5, 1.0, 2.0}) {
    CHECK(t1[t1.index_of(t)] == doctest::Approx(std::exp(t)).epsilon(2e-5));
    CHECK(thalf[thalf.index_of(t)] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(t0[t0.index_of(t)] == doctest::Approx(g2.survival(t)).epsilon(1e-6));
  }
}

TEST_CASE("kinetic total equals the branching-process mean") {
  for (double alpha : {1.0, 3.0}) {
    for (double a2 : {0.5, 1.0}) {
      auto f = solve_fission_B(fission_rate(alpha, a2), death_rate(alpha, a2),
                               3.0, 1e-3);
      auto bh = bellman_harris_mean(GammaBranching(alpha, a2), 3.0, 1e-3);
      for (double t : {0.75, 1.5, 3.0}) {
        CHECK(f.total_population(t) ==
              doctest::Approx(bh[bh.index_of(t)]).epsilon(1e-4));
      }
    }
  }
}

TEST_CASE("tabulated waiting-time density matches the analytic family") {
  const double alpha = 2.0, a2 = 0.8;
  GammaBranching gb(alpha, a2);
  const double da = 1e-3;
  const std::size_t n = static_cast<std::size_t>(std::round(12.0 / da)) + 1;
  GridFunction gpdf = GridFunction::zeros(0.0, da, n);
  for (std::size_t i = 0; i < n; ++i) gpdf[i] = gb.pdf(gpdf.node(i));
  auto tab = bellman_harris_mean(gpdf, a2, 2.0, 1e-3);
  auto ana = bellman_harris_mean(gb, 2.0, 1e-3);
  for (double t : {0.5, 1.0, 2.0})
    CHECK(tab[tab.index_of(t)] ==
          doctest::Approx(ana[ana.index_of(t)]).epsilon(1e-5));
}

TEST_CASE("rejects singular kernels and future TOBs") {
  CHECK_THROWS_AS(solve_fission_B(fission_rate(0.5, 1.0), death_rate(0.5, 1.0), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(bellman_harris_mean(GammaBranching(0.5, 1.0), 1.0),
                  std::invalid_argument);
  auto f = solve_fission_B(fission_rate(1.0, 1.0), death_rate(1.0, 1.0), 1.0,
                           0.01);
  CHECK_THROWS_AS(f.eval_xyt(0.8, 0.5), std::domain_error);
}
