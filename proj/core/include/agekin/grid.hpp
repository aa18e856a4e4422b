#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace agekin {

/// A function sampled on a uniform 1-D grid starting at t0 with step dt.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(double t0, double dt, std::vector<double> values);

  static GridFunction zeros(double t0, double dt, std::size_t n);

  double t0() const { return t0_; }
  double dt() const { return dt_; }
  std::size_t size() const { return values_.size(); }
  double node(std::size_t i) const { return t0_ + dt_ * static_cast<double>(i); }
  double back_node() const { return node(values_.size() - 1); }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Value at an arbitrary point by linear interpolation; exact at nodes.
  double interp(double t) const;

  /// Index of the node nearest to t; throws if t is not a node to within tol.
  std::size_t index_of(double t, double tol = 1e-9) const;

  /// Trapezoid quadrature over the full range.
  double quadrature() const;

  /// Trapezoid quadrature over [a, b] (both must be nodes).
  double quadrature(double a, double b) const;

 private:
  double t0_ = 0.0;
  double dt_ = 1.0;
  std::vector<double> values_;
};

/// A function sampled on a uniform 2-D grid (rows: first axis, cols: second).
class GridFunction2D {
 public:
  GridFunction2D() = default;
  GridFunction2D(double a0, double da, std::size_t na, double t0, double dt,
                 std::size_t nt);

  double a0() const { return a0_; }
  double da() const { return da_; }
  double t0() const { return t0_; }
  double dt() const { return dt_; }
  std::size_t na() const { return na_; }
  std::size_t nt() const { return nt_; }
  double a_node(std::size_t i) const { return a0_ + da_ * static_cast<double>(i); }
  double t_node(std::size_t j) const { return t0_ + dt_ * static_cast<double>(j); }

  double operator()(std::size_t i, std::size_t j) const {
    return values_[i * nt_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * nt_ + j]; }
  const std::vector<double>& values() const { return values_; }

 private:
  double a0_ = 0.0, da_ = 1.0, t0_ = 0.0, dt_ = 1.0;
  std::size_t na_ = 0, nt_ = 0;
  std::vector<double> values_;
};

/// Trapezoid weights helper: w0/2, w1..w_{n-2}, w_{n-1}/2 times dt.
double trapezoid(const std::vector<double>& v, double dt);

}  // namespace agekin
