#include "agekin/celldiv.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <stdexcept>

#include "agekin/rates.hpp"

namespace agekin {

namespace {

constexpr double kIntegerTol = 1e-9;

bool is_integer_alpha(double alpha) {
  return std::abs(alpha - std::round(alpha)) < kIntegerTol;
}

void check_args(double alpha, double t) {
  if (!(alpha > 0.0)) throw std::domain_error("celldiv: alpha must be > 0");
  if (t < 0.0) throw std::domain_error("celldiv: t must be >= 0");
}

// Branch-cut integrand common to both transforms (without the 1/(r+1)).
double cut_density(double r, double alpha, double tau, double sin_pa,
                   double cos_pa) {
  const double ra = std::pow(r, alpha);
  const double denom = ra * ra - 4.0 * ra * cos_pa + 4.0;
  return std::exp(-tau * (r + 1.0)) * ra * sin_pa / denom;
}

struct CutIntegral {
  double value = 0.0;
  double error = 0.0;
};

// Integral of cut_density (optionally with the extra 1/(r+1) weight) over
// r in (0, r_max], r_max chosen so the dropped tail is below 1e-12 of scale.
CutIntegral integrate_cut(double alpha, double tau, bool weight_r1) {
  const double sin_pa = std::sin(M_PI * alpha);
  const double cos_pa = std::cos(M_PI * alpha);
  const double r_max = 1.0 + 45.0 / std::max(tau, 1e-3);
  boost::math::quadrature::tanh_sinh<double> quad;
  double err = 0.0;
  double val;
  if (alpha < 1.0) {
    // Substitute u = log r near the origin to tame the r^alpha factor.
    const double u_min = -42.0 / (alpha + 1.0);
    const auto f = [&](double u) {
      const double r = std::exp(u);
      const double v = cut_density(r, alpha, tau, sin_pa, cos_pa) * r;
      return weight_r1 ? v / (r + 1.0) : v;
    };
    val = quad.integrate(f, u_min, std::log(r_max), 1e-12, &err);
  } else {
    const auto f = [&](double r) {
      const double v = cut_density(r, alpha, tau, sin_pa, cos_pa);
      return weight_r1 ? v / (r + 1.0) : v;
    };
    val = quad.integrate(f, 0.0, r_max, 1e-12, &err);
  }
  return {val, err};
}

// All alpha-th roots of 2 for integer alpha (each pole counted once).
std::vector<std::complex<double>> integer_poles(int n) {
  std::vector<std::complex<double>> poles;
  const double c = std::pow(2.0, 1.0 / n);
  poles.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double phi = 2.0 * M_PI * k / n;
    poles.emplace_back(c * std::cos(phi), c * std::sin(phi));
  }
  return poles;
}

}  // namespace

BromwichResult B_closed_form_detail(double alpha, double t) {
  check_args(alpha, t);
  BromwichResult out;
  const double tau = alpha * t;
  const double c = std::pow(2.0, 1.0 / alpha);

  if (is_integer_alpha(alpha)) {
    const int n = static_cast<int>(std::round(alpha));
    std::complex<double> sum = 0.0;
    for (const auto& s : integer_poles(n)) {
      // Residue of e^{s tau}/(s^alpha - 2): e^{s tau} s / (2 alpha).
      sum += std::exp(s * tau) * s / (2.0 * alpha);
      out.pole_angles.push_back(std::arg(s));
    }
    out.residues = alpha * std::exp(-tau) * sum.real();
    out.residue_imag = alpha * std::exp(-tau) * sum.imag();
    out.branch_cut = 0.0;  // sin(pi alpha) = 0
  } else {
    // Closing the Bromwich contour leftwards puts the cut contribution on
    // the opposite side of the residue identity, hence the + sign here.
    const auto cut = integrate_cut(alpha, tau, /*weight_r1=*/false);
    out.branch_cut = (alpha / M_PI) * cut.value;
    out.quadrature_error = (alpha / M_PI) * cut.error;
    const int nmax = static_cast<int>(std::floor(alpha / 2.0));
    double sum = 0.0;
    for (int n = -nmax; n <= nmax; ++n) {
      const double phi = 2.0 * M_PI * n / alpha;
      sum += std::pow(2.0, 1.0 / alpha - 1.0) *
             std::exp((c * std::cos(phi) - 1.0) * tau) *
             std::cos(c * tau * std::sin(phi) + phi);
      out.pole_angles.push_back(phi);
    }
    out.residues = sum;
  }
  out.total = out.branch_cut + out.residues;
  return out;
}

double B_closed_form(double alpha, double t) {
  return B_closed_form_detail(alpha, t).total;
}

BromwichResult T_closed_form_detail(double alpha, double t) {
  check_args(alpha, t);
  BromwichResult out;
  const double tau = alpha * t;
  const double c = std::pow(2.0, 1.0 / alpha);

  if (is_integer_alpha(alpha)) {
    const int n = static_cast<int>(std::round(alpha));
    std::complex<double> sum = 0.0;
    for (const auto& s : integer_poles(n)) {
      // Residue of e^{s tau}(s^alpha - 1)/((s - 1)(s^alpha - 2)) at s^alpha=2:
      // e^{s tau} s / (2 alpha (s - 1)); s = 1 stays a removable point.
      sum += std::exp(s * tau) * s / (2.0 * alpha * (s - 1.0));
      out.pole_angles.push_back(std::arg(s));
    }
    out.residues = std::exp(-tau) * sum.real();
    out.residue_imag = std::exp(-tau) * sum.imag();
    out.branch_cut = 0.0;
  } else {
    const auto cut = integrate_cut(alpha, tau, /*weight_r1=*/true);
    out.branch_cut = -(1.0 / M_PI) * cut.value;
    out.quadrature_error = (1.0 / M_PI) * cut.error;
    const int nmax = static_cast<int>(std::floor(alpha / 2.0));
    double sum = 0.0;
    for (int n = -nmax; n <= nmax; ++n) {
      const double phi = 2.0 * M_PI * n / alpha;
      const double osc = c * tau * std::sin(phi);
      const double denom = c * c - 2.0 * c * std::cos(phi) + 1.0;
      sum += (c / (2.0 * alpha)) * std::exp((c * std::cos(phi) - 1.0) * tau) *
             (c * std::cos(osc) - std::cos(osc + phi)) / denom;
      out.pole_angles.push_back(phi);
    }
    out.residues = sum;
  }
  out.total = out.branch_cut + out.residues;
  return out;
}

double T_closed_form(double alpha, double t) {
  return T_closed_form_detail(alpha, t).total;
}

std::complex<long double> B_transform(double alpha,
                                      std::complex<long double> s) {
  // alpha^alpha / ((s+alpha)^alpha - 2 alpha^alpha), scaled to avoid
  // overflow: 1 / (((s+alpha)/alpha)^alpha - 2).
  const long double a = alpha;
  const std::complex<long double> w = a * std::log((s + a) / a);
  if (w.real() > 11000.0L) return 0.0L;
  return 1.0L / (std::exp(w) - 2.0L);
}

std::complex<long double> T_transform(double alpha,
                                      std::complex<long double> s) {
  const long double a = alpha;
  const std::complex<long double> w = a * std::log((s + a) / a);
  if (w.real() > 11000.0L) return 1.0L / s;
  const std::complex<long double> e = std::exp(w);
  return (e - 1.0L) / (s * (e - 2.0L));
}

double celldiv_abscissa(double alpha) {
  return alpha * (std::pow(2.0, 1.0 / alpha) - 1.0) + 1.0;
}

double reference_growth(ReferenceGrowth kind, double t) {
  if (t < 0.0) throw std::domain_error("reference_growth: t must be >= 0");
  switch (kind) {
    case ReferenceGrowth::GaltonWatson:
      return std::pow(2.0, std::floor(t));
    case ReferenceGrowth::Markov:
      return std::exp(t);
  }
  return 0.0;
}

double age_time_distribution(double alpha, double x, double t) {
  check_args(alpha, t);
  if (!(x > 0.0) || x > t)
    throw std::domain_error("age_time_distribution: need 0 < x <= t");
  GammaBranching gb(alpha, 1.0);
  return 2.0 * B_closed_form(alpha, x) * gb.survival(t - x);
}

}  // namespace agekin
