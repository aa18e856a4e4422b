#pragma once

#include <complex>
#include <vector>

#include "agekin/laplace.hpp"

namespace agekin {

/// Pieces of a Bromwich-contour evaluation: the branch-cut integral along
/// the negative axis and the residue sum over the poles at the alpha-th
/// roots of 2. For integer alpha the transform is meromorphic and the
/// branch term is identically zero.
struct BromwichResult {
  double branch_cut = 0.0;
  double residues = 0.0;
  double total = 0.0;  // branch_cut + residues, exactly
  std::vector<double> pole_angles;  // 2 pi n / alpha over the summed poles
  double quadrature_error = 0.0;    // estimate for the branch integral
  double residue_imag = 0.0;        // leftover imaginary part, conjugate pairing
};

/// Newborn-pair flux B(t) for gamma-distributed division times with unit
/// mean, shape alpha, and certain division (a2 = 1).
BromwichResult B_closed_form_detail(double alpha, double t);
double B_closed_form(double alpha, double t);

/// Mean total population T(t) for the same model.
BromwichResult T_closed_form_detail(double alpha, double t);
double T_closed_form(double alpha, double t);

/// Laplace transforms the closed forms invert, in overflow-safe form;
/// used to cross-check against the numerical inversion oracle.
std::complex<long double> B_transform(double alpha, std::complex<long double> s);
std::complex<long double> T_transform(double alpha, std::complex<long double> s);

/// A contour abscissa strictly right of every pole of the transforms.
double celldiv_abscissa(double alpha);

enum class ReferenceGrowth { GaltonWatson, Markov };

/// Reference growth laws: discrete doubling 2^floor(t) and exponential e^t.
double reference_growth(ReferenceGrowth kind, double t);

/// Mean age-time density T(x, t) = 2 B(x) (1 - G(t - x)) for 0 < x <= t.
double age_time_distribution(double alpha, double x, double t);

}  // namespace agekin
