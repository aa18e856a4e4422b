#pragma once

#include "agekin/grid.hpp"
#include "agekin/rates.hpp"

namespace agekin {

struct FissionXYT {
  double x = 0.0;  // singlet density
  double y = 0.0;  // doublet-pair density
  double t = 0.0;  // total individual density, x + 2y
};

/// Mean-field solution of the binary fission-death process in TOB
/// coordinates. The founder population is either a unit point mass at
/// x = 0 (handled analytically, never smeared onto the grid) or a pair of
/// densities on x <= 0.
class FissionMeanField {
 public:
  double dt() const { return h_; }
  double horizon() const { return horizon_; }
  const GridFunction& fecundity() const { return fecundity_; }

  /// Survival factor exp(-int_{t1}^{t2} (beta+mu)(s - x) ds), t1 <= t2,
  /// x <= t1.
  double propagator_u(double x, double t1, double t2) const;

  /// Densities at TOB x and time t. x > t is a domain error (no future
  /// TOBs). For a point-mass founder the x <= 0 density is zero almost
  /// everywhere; the atom itself is carried by total_population.
  FissionXYT eval_xyt(double x, double t) const;

  /// Total mean population at a time node.
  double total_population(double t) const;

  friend FissionMeanField solve_fission_B(const AgeRate&, const AgeRate&,
                                          double, double);
  friend FissionMeanField solve_fission_B(const AgeRate&, const AgeRate&,
                                          const GridFunction&,
                                          const GridFunction&, double, double);

 private:
  AgeRate beta_ = AgeRate::constant(0.0);
  AgeRate mu_ = AgeRate::constant(0.0);
  GridFunction fecundity_;
  std::vector<double> lam_;  // cumulative beta+mu hazard at grid ages
  double h_ = 0.0, horizon_ = 0.0;
  bool point_mass_ = true;
  GridFunction init_x0_, init_y0_;  // densities on [-A, 0] when !point_mass_
};

/// Newborn-doublet density B(t) for one age-zero founder, via the renewal
/// equation B(t) = 2 int_0^t B(x) U(x;x,t) beta(t-x) dx + U(0;0,t) beta(t).
FissionMeanField solve_fission_B(const AgeRate& beta, const AgeRate& mu,
                                 double horizon, double dt = 1e-3);

/// Same with founder densities X0, Y0 sampled on x in [-A, 0].
FissionMeanField solve_fission_B(const AgeRate& beta, const AgeRate& mu,
                                 const GridFunction& x0, const GridFunction& y0,
                                 double horizon, double dt = 1e-3);

/// Mean head count of the binary branching process with waiting-time
/// density g and fission probability a2, by the renewal equation
/// T(t) = 1 - G(t) + 2 a2 int_0^t g(t - tau) T(tau) dtau.
GridFunction bellman_harris_mean(const GammaBranching& dist, double horizon,
                                 double dt = 1e-3);

/// Tabulated waiting-time variant; g_pdf is sampled on [0, A].
GridFunction bellman_harris_mean(const GridFunction& g_pdf, double a2,
                                 double horizon, double dt = 1e-3);

}  // namespace agekin
