#include "agekin/laplace.hpp"

#include <cmath>
#include <stdexcept>

namespace agekin {

namespace {

// Abate & Valko's fixed-Talbot rule with M nodes on s(theta) =
// r*theta*(cot(theta) + i), theta_k = k*pi/M, r = 2M/(5t).
double talbot(const LaplaceTransform& F, double t, double shift, int M) {
  using cplx = std::complex<long double>;
  const long double pi = 3.14159265358979323846264338327950288L;
  const long double tl = t;
  const long double c = shift;
  const long double r = 2.0L * M / (5.0L * tl);
  long double sum = 0.5L * std::exp(r * tl) * F(cplx(r + c, 0.0L)).real();
  for (int k = 1; k < M; ++k) {
    const long double theta = k * pi / M;
    const long double cot = std::cos(theta) / std::sin(theta);
    const cplx s(r * theta * cot, r * theta);
    const long double sigma = theta + (theta * cot - 1.0L) * cot;
    sum += (std::exp(s * tl) * F(s + c) * cplx(1.0L, sigma)).real();
  }
  return static_cast<double>(std::exp(c * tl) * sum * r / M);
}

}  // namespace

LaplaceInversion numerical_laplace_inverse(const LaplaceTransform& transform,
                                           double t, double shift, int nodes,
                                           double tolerance) {
  if (t <= 0.0)
    throw std::domain_error("numerical_laplace_inverse: t must be > 0");
  // Roundoff grows as e^{2M/5} * eps80; beyond M ~ 64 it wins again.
  nodes = std::min(std::max(nodes, 16), 64);
  const double coarse = talbot(transform, t, shift, nodes - 8);
  const double fine = talbot(transform, t, shift, nodes);
  LaplaceInversion out;
  out.value = fine;
  const double scale = std::max(std::abs(fine), 1e-300);
  out.error_estimate = std::abs(fine - coarse) / scale;
  out.flagged = !(out.error_estimate <= tolerance);
  return out;
}

}  // namespace agekin
