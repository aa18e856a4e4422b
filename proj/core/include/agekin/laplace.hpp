#pragma once

#include <complex>
#include <functional>

namespace agekin {

/// Transforms are evaluated in extended precision: the Talbot rule
/// amplifies any error in F by e^{2M/5}, so double-precision values would
/// cap the usable node count near 40.
using LaplaceTransform =
    std::function<std::complex<long double>(std::complex<long double>)>;

struct LaplaceInversion {
  double value = 0.0;
  double error_estimate = 0.0;  // relative, from node-count halving
  bool flagged = false;         // estimate above the requested tolerance
};

/// Fixed-contour (deformed Bromwich) inversion of a Laplace transform at
/// t > 0 via the Abate-Valko fixed-Talbot rule, applied to the shifted
/// transform F(s + shift); shift must lie right of every singularity.
LaplaceInversion numerical_laplace_inverse(const LaplaceTransform& transform,
                                           double t, double shift = 0.0,
                                           int nodes = 48,
                                           double tolerance = 1e-8);

}  // namespace agekin
