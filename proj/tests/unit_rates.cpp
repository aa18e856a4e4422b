#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <random>
#include <stdexcept>

#include "agekin/rates.hpp"

using namespace agekin;

namespace {

// Adaptive Simpson, used as an independent quadrature oracle.
double simpson(const std::function<double(double)>& f, double a, double b,
               double fa, double fm, double fb, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps)
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, eps / 2.0, depth - 1) +
         simpson(f, m, b, fm, frm, fb, eps / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double eps = 1e-12) {
  const double m = 0.5 * (a + b);
  return simpson(f, a, b, f(a), f(m), f(b), eps, 40);
}

}  // namespace

TEST_CASE("rate kinds evaluate as declared") {
  CHECK(AgeRate::constant(0.7).eval(13.0) == doctest::Approx(0.7));
  CHECK(AgeRate::linear(1.0).eval(2.0, 57.0) == doctest::Approx(2.0));

  auto cap = AgeRate::constant(1.0).with_capacity(CapacityModifier::constant(5.0));
  CHECK(cap.eval(3.7, 5.0) == 0.0);
  CHECK(cap.eval(3.7, 7.0) == 0.0);  // clamps, never negative
  CHECK(cap.eval(0.1, 2.0) == doctest::Approx(0.6));

  CHECK_THROWS_AS(AgeRate::constant(1.0).eval(-0.5), std::domain_error);
}

TEST_CASE("tabulated rates are exact at nodes and interpolate between") {
  auto tab = AgeRate::tabulated({0.0, 1.0, 2.0}, {0.5, 1.5, 0.0});
  CHECK(tab.eval(0.0) == 0.5);
  CHECK(tab.eval(1.0) == 1.5);
  CHECK(tab.eval(2.0) == 0.0);
  CHECK(tab.eval(0.5) == doctest::Approx(1.0));
  CHECK(tab.eval(5.0) == 0.0);  // clamped beyond the table
}

TEST_CASE("eval is pure: identical inputs give identical bit patterns") {
  auto r = AgeRate::gamma_hazard(2.7, 0.8);
  const double x = r.eval(1.234567);
  const double y = r.eval(1.234567);
  CHECK(std::memcmp(&x, &y, sizeof x) == 0);
}

TEST_CASE("unit-mean gamma pdf/cdf/hazard") {
  GammaBranching gb(1.0, 1.0);
  CHECK(gb.pdf(0.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(gb.cdf(0.5) == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-12));
  CHECK(gb.hazard(0.5) == doctest::Approx(1.0).epsilon(1e-12));

  GammaBranching g3(3.0, 1.0);
  CHECK(g3.pdf(0.0) == 0.0);
  CHECK(g3.cdf(0.0) == 0.0);

  // Quadrature oracle for the stated density at alpha = 3.
  const auto pdf = [&](double t) { return g3.pdf(t); };
  const double mass01 = integrate(pdf, 0.0, 1.0);
  CHECK(g3.cdf(1.0) == doctest::Approx(mass01).epsilon(1e-10));
  // Panel-wise so the adaptive rule cannot mistake the peaked pdf for zero.
  double total = 0.0;
  const double panels[] = {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
  for (std::size_t i = 0; i + 1 < std::size(panels); ++i)
    total += integrate(pdf, panels[i], panels[i + 1]);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(g3.hazard(1.0) ==
        doctest::Approx(g3.pdf(1.0) / (1.0 - mass01)).epsilon(1e-9));

  CHECK_THROWS_AS(gb.pdf(-1.0), std::domain_error);
}

TEST_CASE("gamma cdf is nondecreasing and saturates to 1") {
  GammaBranching gb(2.5, 1.0);
  double prev = 0.0;
  for (double t = 0.0; t <= 12.0; t += 0.25) {
    const double c = gb.cdf(t);
    CHECK(c >= prev);
    prev = c;
  }
  CHECK(gb.cdf(60.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gamma hazard with alpha=1 is the unit constant") {
  GammaBranching gb(1.0, 0.5);
  for (double t = 0.0; t <= 20.0; t += 0.5)
    CHECK(gb.hazard(t) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("hazard saturates with a flag once survival underflows") {
  GammaBranching gb(100.0, 1.0);
  bool saturated = false;
  const double h = gb.hazard(40.0, &saturated);
  CHECK(saturated);
  CHECK(h == GammaBranching::hazard_cap());
}

TEST_CASE("propagator closed forms and quadrature cross-check") {
  auto mu_c = AgeRate::constant(0.8);
  CHECK(propagator(mu_c, 1.0, 3.0) == doctest::Approx(std::exp(-1.6)).epsilon(1e-13));
  CHECK(propagator(mu_c, 2.0, 2.0) == 1.0);

  auto mu_l = AgeRate::linear(1.0);
  CHECK(propagator(mu_l, 0.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  const double quad = integrate([&](double s) { return mu_l.eval(s); }, 0.0, 2.0);
  CHECK(propagator(mu_l, 0.0, 2.0) ==
        doctest::Approx(std::exp(-quad)).epsilon(1e-10));

  CHECK_THROWS_AS(propagator(mu_c, 3.0, 1.0), std::domain_error);
}

TEST_CASE("propagator splits multiplicatively at any midpoint") {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  const AgeRate kinds[] = {AgeRate::constant(0.7), AgeRate::linear(0.9),
                           AgeRate::gamma_hazard(2.0, 0.6),
                           AgeRate::tabulated({0.0, 1.0, 3.0, 5.0},
                                              {0.2, 1.0, 0.4, 0.9})};
  for (const auto& mu : kinds) {
    for (int it = 0; it < 200; ++it) {
      double x[3] = {u(rng), u(rng), u(rng)};
      std::sort(x, x + 3);
      const double whole = propagator(mu, x[0], x[2]);
      const double split = propagator(mu, x[0], x[1]) * propagator(mu, x[1], x[2]);
      CHECK(whole == doctest::Approx(split).epsilon(1e-12));
    }
  }
}

TEST_CASE("capacity table is piecewise constant in time") {
  CapacityModifier cap{{0.0, 2.0}, {5.0, 10.0}};
  auto r = AgeRate::constant(1.0).with_capacity(cap);
  CHECK(r.eval(0.0, 5.0, 1.9) == 0.0);
  CHECK(r.eval(0.0, 5.0, 2.1) == doctest::Approx(0.5));
}

TEST_CASE("max_over bounds the hazard on an interval") {
  const AgeRate kinds[] = {AgeRate::constant(0.7), AgeRate::linear(0.9),
                           AgeRate::gamma_hazard(3.0, 1.0),
                           AgeRate::gamma_hazard(0.7, 1.0),
                           AgeRate::tabulated({0.0, 1.0, 3.0}, {0.2, 2.0, 0.1})};
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (const auto& r : kinds) {
    for (int it = 0; it < 100; ++it) {
      double a = u(rng), b = u(rng);
      if (a > b) std::swap(a, b);
      const double m = r.max_over(a, b);
      for (int k = 0; k <= 20; ++k) {
        const double x = a + (b - a) * k / 20.0;
        CHECK(r.eval(x) <= m * (1.0 + 1e-12) + 1e-15);
      }
    }
  }
}
