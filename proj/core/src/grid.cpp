#include "agekin/grid.hpp"

#include <cmath>

namespace agekin {

GridFunction::GridFunction(double t0, double dt, std::vector<double> values)
    : t0_(t0), dt_(dt), values_(std::move(values)) {
  if (dt_ <= 0.0) throw std::invalid_argument("GridFunction: dt must be > 0");
  if (values_.size() < 2)
    throw std::invalid_argument("GridFunction: need at least 2 nodes");
}

GridFunction GridFunction::zeros(double t0, double dt, std::size_t n) {
  return GridFunction(t0, dt, std::vector<double>(n, 0.0));
}

double GridFunction::interp(double t) const {
  const double x = (t - t0_) / dt_;
  if (x <= 0.0) return values_.front();
  if (x >= static_cast<double>(values_.size() - 1)) return values_.back();
  const auto i = static_cast<std::size_t>(x);
  const double frac = x - static_cast<double>(i);
  if (frac == 0.0) return values_[i];
  return values_[i] * (1.0 - frac) + values_[i + 1] * frac;
}

std::size_t GridFunction::index_of(double t, double tol) const {
  const double x = (t - t0_) / dt_;
  const double r = std::round(x);
  if (std::abs(x - r) > tol / dt_ || r < 0.0 ||
      r > static_cast<double>(values_.size() - 1)) {
    throw std::invalid_argument("GridFunction: point is not a grid node");
  }
  return static_cast<std::size_t>(r);
}

double GridFunction::quadrature() const { return trapezoid(values_, dt_); }

double GridFunction::quadrature(double a, double b) const {
  const std::size_t i = index_of(a), j = index_of(b);
  if (j < i) throw std::invalid_argument("GridFunction: empty quadrature range");
  if (i == j) return 0.0;
  double s = 0.5 * (values_[i] + values_[j]);
  for (std::size_t k = i + 1; k < j; ++k) s += values_[k];
  return s * dt_;
}

GridFunction2D::GridFunction2D(double a0, double da, std::size_t na, double t0,
                               double dt, std::size_t nt)
    : a0_(a0), da_(da), t0_(t0), dt_(dt), na_(na), nt_(nt),
      values_(na * nt, 0.0) {
  if (da_ <= 0.0 || dt_ <= 0.0)
    throw std::invalid_argument("GridFunction2D: steps must be > 0");
  if (na_ < 2 || nt_ < 2)
    throw std::invalid_argument("GridFunction2D: need at least 2 nodes per axis");
}

double trapezoid(const std::vector<double>& v, double dt) {
  if (v.size() < 2) return 0.0;
  double s = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
  return s * dt;
}

}  // namespace agekin
