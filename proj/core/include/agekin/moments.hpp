#pragma once

#include <functional>
#include <optional>

#include "agekin/grid.hpp"
#include "agekin/mvf.hpp"
#include "agekin/rates.hpp"

namespace agekin {

/// Which side of a transport seam (age == elapsed time) to read. Fields are
/// discontinuous across seams, so quadratures pick the side explicitly.
enum class SeamSide { Lower, Upper };

/// First factorial moment X1(a;t): the expected age density. Thin wrapper
/// over the transport solution that adds branch-aware evaluation.
class MomentField1 {
 public:
  MomentField1(MvfSolution sol, AgeRate beta, AgeRate mu, double horizon,
               double dt);

  double dt() const { return h_; }
  double horizon() const { return horizon_; }
  const MvfSolution& solution() const { return sol_; }
  const AgeRate& beta() const { return beta_; }
  const AgeRate& mu() const { return mu_; }
  double age_top() const;

  /// X1 at grid nodes. The a == t seam reads the requested side
  /// (Lower = fecundity branch, Upper = initial-condition branch).
  double value(double a, double t,
               SeamSide side = SeamSide::Lower) const;

  /// int_{w0}^{w1} X1(a;t) da, split at the seam. w1 may be infinite.
  double window_integral(double w0, double w1, double t) const;

 private:
  MvfSolution sol_;
  AgeRate beta_, mu_;
  double horizon_, h_;
};

struct MomentK1Options {
  double dt = 1e-3;
  double tail_mass_tol = 1e-10;
};

/// k = 1 reduces to the mean-field transport equation; this delegates to
/// solve_mvf so k = 1 and k = 2 share one interface.
MomentField1 solve_factorial_moment_k1(const GridFunction& initial,
                                       const AgeRate& beta, const AgeRate& mu,
                                       double horizon,
                                       const MomentK1Options& opt = {});

struct MomentK2Options {
  double dt = 1e-3;
  double tail_mass_tol = 1e-10;
  /// Upper edge of the initial pair density's support (0: no initial pairs).
  double init2_age_max = 0.0;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Second factorial moment X2(a,b;t), symmetric in (a,b) by construction.
///
/// The newborn-pair boundary X2(a,0;t) is solved on characteristic
/// coordinates in the two regions t < a and t > a as a family of coupled
/// Volterra recursions, in the half-density normalization (the stored face
/// equals X2(a,0;t)/2); field evaluation doubles it back. The field itself
/// is the face value transported with a product of survival propagators.
class MomentField2 {
 public:
  double dt() const { return h_; }
  double horizon() const { return horizon_; }

  /// Boundary face in the half normalization. x is the newborn partner's
  /// age gap, s the time; side resolves the x == s seam.
  double boundary_half(double x, double s,
                       SeamSide side = SeamSide::Lower) const;

  /// X2 at grid nodes; seam conventions put age == t into the transported
  /// (fecundity) branch. Symmetric under swapping a and b.
  double value(double a, double b, double t) const;

  /// int int_{[w0,w1]^2} X2 da db at time t, seam-split. w1 may be infinite.
  double window_integral(double w0, double w1, double t) const;

  friend MomentField2 solve_factorial_moment_k2(
      const MomentField1&, const AgeRate&, const AgeRate&,
      const std::function<double(double, double)>&, double,
      const MomentK2Options&);

 private:
  double face_at(std::size_t ix, std::size_t is, SeamSide side) const;
  double init2_at(double x, double y) const;
  double node_value(std::size_t ia, bool a_above, std::size_t ib, bool b_above,
                    std::size_t it) const;

  double h_ = 0.0, horizon_ = 0.0;
  std::size_t nt_ = 0;     // time nodes (horizon/h + 1)
  std::size_t nda_ = 0;    // columns in the t < a region
  std::vector<double> lower_;  // [x][s-x], x <= s region, nt_ x nt_ triangle
  std::vector<double> upper_;  // [x-s][s], x >= s region, nda_ x nt_
  std::vector<double> surv_;   // exp(-int mu) at grid ages
  std::function<double(double, double)> init2_;
  double init2_age_max_ = 0.0;
};

/// Solves the k = 2 boundary recursion and wraps field evaluation.
/// x1 must be solved on the same grid (dt mismatch is a configuration error).
/// init2 may be empty (no initial pair correlations).
MomentField2 solve_factorial_moment_k2(
    const MomentField1& x1, const AgeRate& beta, const AgeRate& mu,
    const std::function<double(double, double)>& init2, double horizon,
    const MomentK2Options& opt = {});

struct WindowMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance of the head count in an age window [w0, w1]:
///   mean = int X1,  var = iint X2 + int X1 - (int X1)^2.
/// The diagonal term realizes E[N^2] = E[(N)_2] + E[N] at the window level.
WindowMoments window_mean_var(const MomentField1& x1, const MomentField2& x2,
                              double w0, double w1, double t);

struct YuleFurryValues {
  double x1 = 0.0;        // X1(a;t)
  double x2 = 0.0;        // X2(a,b;t)
  double mean = 0.0;      // E[count in [a,b]]
  double variance = 0.0;  // Var[count in [a,b]]
};

/// Closed forms for the pure-birth process at constant rate beta started
/// from one founder with age density lambda*exp(-lambda*a): the three-regime
/// piecewise expressions for X1, X2 and the window mean/variance.
YuleFurryValues yule_furry_closed(double lambda, double beta, double a,
                                  double b, double t);

}  // namespace agekin
