#pragma once

#include <functional>

#include "agekin/grid.hpp"

namespace agekin {

/// Solves the Volterra equation of the second kind
///   B(t) = forcing(t) + int_0^t kernel(t, s) B(s) ds
/// on the forcing's grid by forward substitution with trapezoid weights
/// (the diagonal term is moved to the left-hand side). Second-order in dt
/// for smooth kernels.
GridFunction solve_volterra(const std::function<double(double, double)>& kernel,
                            const GridFunction& forcing);

/// Convolution-kernel variant: kernel(t, s) = k(t - s) with k sampled at the
/// forcing's grid offsets (kernel_nodes[i] = k(i * dt)). Same scheme, but
/// the kernel is evaluated once per node instead of once per pair.
GridFunction solve_volterra_conv(const std::vector<double>& kernel_nodes,
                                 const GridFunction& forcing);

}  // namespace agekin
