#include "agekin/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace agekin {

namespace {

std::size_t node_index(double x, double h, const char* what) {
  const double r = std::round(x / h);
  if (r < 0.0 || std::abs(x - r * h) > 1e-9)
    throw std::invalid_argument(std::string(what) + ": not a grid node");
  return static_cast<std::size_t>(r);
}

void require_bounded_kernel(const AgeRate& rate, const char* what) {
  if (rate.kind() == AgeRate::Kind::GammaHazard && rate.gamma_alpha() < 1.0)
    throw std::invalid_argument(std::string(what) +
                                ": gamma hazard with alpha < 1 has an unbounded "
                                "kernel at age 0");
}

struct AxisPiece {
  std::size_t lo, hi;  // node indices, inclusive
  bool above;          // true: ages >= t side of the seam
};

std::vector<AxisPiece> split_axis(std::size_t i0, std::size_t i1, std::size_t it) {
  std::vector<AxisPiece> pieces;
  if (i1 <= it) {
    pieces.push_back({i0, i1, false});
  } else if (i0 >= it) {
    pieces.push_back({i0, i1, true});
  } else {
    pieces.push_back({i0, it, false});
    pieces.push_back({it, i1, true});
  }
  return pieces;
}

}  // namespace

// ---------------------------------------------------------------------------
// MomentField1

MomentField1::MomentField1(MvfSolution sol, AgeRate beta, AgeRate mu,
                           double horizon, double dt)
    : sol_(std::move(sol)), beta_(std::move(beta)), mu_(std::move(mu)),
      horizon_(horizon), h_(dt) {}

double MomentField1::age_top() const {
  return sol_.initial.back_node() + horizon_;
}

double MomentField1::value(double a, double t, SeamSide side) const {
  return sol_.value(a, t, side == SeamSide::Upper);
}

double MomentField1::window_integral(double w0, double w1, double t) const {
  const std::size_t it = node_index(t, h_, "window time");
  const std::size_t i0 = node_index(w0, h_, "window edge");
  const double w1_eff = std::min(w1, age_top());
  const std::size_t i1 = node_index(w1_eff, h_, "window edge");
  if (i1 < i0) throw std::invalid_argument("window_integral: w1 < w0");
  if (i1 == i0) return 0.0;

  double total = 0.0;
  for (const auto& p : split_axis(i0, i1, it)) {
    if (p.hi == p.lo) continue;
    const SeamSide side = p.above ? SeamSide::Upper : SeamSide::Lower;
    double s = 0.5 * (value(h_ * static_cast<double>(p.lo), t, side) +
                      value(h_ * static_cast<double>(p.hi), t, side));
    for (std::size_t i = p.lo + 1; i < p.hi; ++i)
      s += value(h_ * static_cast<double>(i), t, side);
    total += s * h_;
  }
  return total;
}

MomentField1 solve_factorial_moment_k1(const GridFunction& initial,
                                       const AgeRate& beta, const AgeRate& mu,
                                       double horizon,
                                       const MomentK1Options& opt) {
  MvfOptions mopt;
  mopt.dt = opt.dt;
  mopt.tail_mass_tol = opt.tail_mass_tol;
  mopt.materialize_density = false;
  MvfSolution sol = solve_mvf(initial, beta, mu, horizon, mopt);
  return MomentField1(std::move(sol), beta, mu, horizon, opt.dt);
}

// ---------------------------------------------------------------------------
// MomentField2

double MomentField2::init2_at(double x, double y) const {
  if (!init2_) return 0.0;
  if (x > init2_age_max_ || y > init2_age_max_) return 0.0;
  return init2_(x, y);
}

double MomentField2::face_at(std::size_t ix, std::size_t is, SeamSide side) const {
  if (ix < is || (ix == is && side == SeamSide::Lower)) {
    // x <= s region, stored as [x][s - x].
    if (ix >= nt_ || is - ix >= nt_) return 0.0;
    return lower_[ix * nt_ + (is - ix)];
  }
  const std::size_t col = ix - is;
  if (col >= nda_ || is >= nt_) return 0.0;
  return upper_[col * nt_ + is];
}

double MomentField2::boundary_half(double x, double s, SeamSide side) const {
  const std::size_t ix = node_index(x, h_, "boundary age");
  const std::size_t is = node_index(s, h_, "boundary time");
  if (is >= nt_) throw std::invalid_argument("boundary_half: time beyond horizon");
  return face_at(ix, is, side);
}

double MomentField2::value(double a, double b, double t) const {
  std::size_t ia = node_index(a, h_, "x2 age");
  std::size_t ib = node_index(b, h_, "x2 age");
  const std::size_t it = node_index(t, h_, "x2 time");
  if (it >= nt_) throw std::invalid_argument("x2 value: t beyond horizon");
  if (ia > ib) std::swap(ia, ib);
  if (it < ia) {
    // Pure transport of the initial pair correlations.
    const double u1 = surv_[ia] / surv_[ia - it];
    const double u2 = surv_[ib] / surv_[ib - it];
    return init2_at(h_ * static_cast<double>(ia - it),
                    h_ * static_cast<double>(ib - it)) * u1 * u2;
  }
  const SeamSide side = (ib <= it) ? SeamSide::Lower : SeamSide::Upper;
  const double face = face_at(ib - ia, it - ia, side);
  return 2.0 * face * surv_[ia] * surv_[ib] / surv_[ib - ia];
}

double MomentField2::window_integral(double w0, double w1, double t) const {
  const std::size_t it = node_index(t, h_, "window time");
  const std::size_t i0 = node_index(w0, h_, "window edge");
  const double top = h_ * static_cast<double>(nda_ + nt_ - 2);
  const std::size_t i1 = node_index(std::min(w1, top), h_, "window edge");
  if (i1 < i0) throw std::invalid_argument("window_integral: w1 < w0");
  if (i1 == i0) return 0.0;

  const auto pieces = split_axis(i0, i1, it);
  double total = 0.0;
  for (const auto& pa : pieces) {
    for (const auto& pb : pieces) {
      if (pa.hi == pa.lo || pb.hi == pb.lo) continue;
      double s = 0.0;
      for (std::size_t ia = pa.lo; ia <= pa.hi; ++ia) {
        const double wa = (ia == pa.lo || ia == pa.hi) ? 0.5 : 1.0;
        for (std::size_t ib = pb.lo; ib <= pb.hi; ++ib) {
          const double wb = (ib == pb.lo || ib == pb.hi) ? 0.5 : 1.0;
          s += wa * wb * node_value(ia, pa.above, ib, pb.above, it);
        }
      }
      total += s * h_ * h_;
    }
  }
  return total;
}

double MomentField2::node_value(std::size_t ia, bool a_above, std::size_t ib,
                                bool b_above, std::size_t it) const {
  if (ia > ib) {
    std::swap(ia, ib);
    std::swap(a_above, b_above);
  }
  if (a_above && b_above) {
    const double u1 = surv_[ia] / surv_[ia - it];
    const double u2 = surv_[ib] / surv_[ib - it];
    return init2_at(h_ * static_cast<double>(ia - it),
                    h_ * static_cast<double>(ib - it)) * u1 * u2;
  }
  const SeamSide side = b_above ? SeamSide::Upper : SeamSide::Lower;
  const double face = face_at(ib - ia, it - ia, side);
  return 2.0 * face * surv_[ia] * surv_[ib] / surv_[ib - ia];
}

// ---------------------------------------------------------------------------
// k = 2 boundary solve

MomentField2 solve_factorial_moment_k2(
    const MomentField1& x1, const AgeRate& beta, const AgeRate& mu,
    const std::function<double(double, double)>& init2, double horizon,
    const MomentK2Options& opt) {
  if (beta.population_dependent() || mu.population_dependent())
    throw std::invalid_argument("k2: rates must be population-independent");
  require_bounded_kernel(beta, "k2");
  if (std::abs(opt.dt - x1.dt()) > 1e-12 * std::max(1.0, x1.dt()))
    throw std::invalid_argument("k2: grid mismatch with the k=1 field");
  if (horizon > x1.horizon() + 1e-12)
    throw std::invalid_argument("k2: horizon exceeds the k=1 field");

  const double h = opt.dt;
  const std::size_t NT = static_cast<std::size_t>(std::round(horizon / h));
  const std::size_t nt = NT + 1;
  const GridFunction& g = x1.solution().initial;
  const GridFunction& B1 = x1.solution().fecundity;

  // Column extent of the t > a region: where either the initial density or
  // the initial pair density still matters.
  std::size_t g_cut = g.size();
  {
    const double total_mass = g.quadrature();
    double tail = 0.0;
    while (g_cut > 2) {
      const double piece = 0.5 * (g[g_cut - 1] + g[g_cut - 2]) * h;
      if (tail + piece > opt.tail_mass_tol * std::max(total_mass, 1e-300)) break;
      tail += piece;
      --g_cut;
    }
  }
  const std::size_t n_init2 =
      (init2 && opt.init2_age_max > 0.0)
          ? node_index(opt.init2_age_max, h, "init2 extent") + 1
          : 0;
  const std::size_t nda = std::max(g_cut, n_init2);

  // Rate and survival tables over every age index the recursion can touch.
  const std::size_t n_top = std::max(nda + 2 * NT, g.size() + NT) + 2;
  std::vector<double> surv(n_top), inv_surv(n_top), bs(n_top), beta_v(n_top);
  for (std::size_t i = 0; i < n_top; ++i) {
    const double a = h * static_cast<double>(i);
    surv[i] = std::exp(-mu.cumulative(a));
    inv_surv[i] = 1.0 / surv[i];
    beta_v[i] = beta.eval(a);
    bs[i] = beta_v[i] * surv[i];
  }
  const double beta0 = beta_v[0];
  const double diag = 1.0 - 0.5 * h * beta0;
  if (std::abs(diag) < 1e-8)
    throw std::runtime_error("k2: ill-conditioned step (1 - dt/2*beta(0) ~ 0)");
  constexpr double kHalf = 0.5;  // boundary carries the half normalization

  // ---- t > a region ("upper"): column alpha' = a - t, level tau' = t.
  // Columns are independent Volterra recursions along characteristics.
  std::vector<double> upper(nda * nt, 0.0);
  const auto solve_column = [&](std::size_t i) {
    double* col = upper.data() + i * nt;
    const double gi = (i < g.size()) ? g[i] : 0.0;
    for (std::size_t j = 0; j < nt; ++j) {
      const std::size_t ai = i + j;
      double acc = kHalf * beta_v[ai] * gi * surv[ai] * inv_surv[i];
      if (n_init2 > 1) {
        // Initial-pair tail: int beta(z+t) U(a-t,a) U(z,z+t) init2(a-t, z) dz.
        const double hoist = kHalf * surv[ai] * inv_surv[i];
        double s = 0.0;
        for (std::size_t z = 0; z < n_init2; ++z) {
          const double w = (z == 0 || z == n_init2 - 1) ? 0.5 : 1.0;
          s += w * bs[z + j] * inv_surv[z] *
               init2(h * static_cast<double>(i), h * static_cast<double>(z));
        }
        acc += hoist * s * h;
      }
      if (j > 0) {
        double s = 0.5 * bs[j] * inv_surv[i] * col[0];
        for (std::size_t k = 1; k < j; ++k)
          s += bs[k] * inv_surv[ai - k] * col[j - k];
        acc += surv[ai] * s * h;
        col[j] = acc / diag;
      } else {
        col[j] = acc;
      }
    }
  };

  {
    unsigned n_threads = opt.threads ? opt.threads
                                     : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, 64);
    if (n_threads <= 1 || nda < 64) {
      for (std::size_t i = 0; i < nda; ++i) solve_column(i);
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (nda + n_threads - 1) / n_threads;
      for (unsigned w = 0; w < n_threads; ++w) {
        const std::size_t lo = w * chunk, hi = std::min(nda, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
          for (std::size_t i = lo; i < hi; ++i) solve_column(i);
        });
      }
      for (auto& th : pool) th.join();
    }
  }

  // Column integrals int D(z, t) dz, reused when the >age kernel separates.
  const bool separable = beta.kind() == AgeRate::Kind::Constant &&
                         mu.kind() == AgeRate::Kind::Constant;
  std::vector<double> col_sum(nt, 0.0);
  if (separable) {
    for (std::size_t j = 0; j < nt; ++j) {
      double s = 0.0;
      for (std::size_t z = 0; z < nda; ++z) {
        const double w = (z == 0 || z == nda - 1) ? 0.5 : 1.0;
        s += w * upper[z * nt + j];
      }
      col_sum[j] = s * h;
    }
  }

  // ---- t >= a region ("lower"): C(alpha, tau) with alpha = a, tau = t - a.
  // Marching by tau level; within a level ascending alpha (the same-level
  // memory integral runs over smaller alpha).
  std::vector<double> lower(nt * nt, 0.0);
  for (std::size_t j = 0; j < nt; ++j) {
    for (std::size_t i = 0; i + j < nt; ++i) {
      double acc = kHalf * beta_v[i] * B1[j] * surv[i];

      // Same-level memory over younger partners (empty at alpha = 0).
      if (i > 0) {
        double s = 0.5 * bs[i] * inv_surv[0] * lower[0 * nt + j];
        for (std::size_t k = 1; k < i; ++k)
          s += bs[k] * inv_surv[i - k] * lower[(i - k) * nt + j];
        acc += surv[i] * s * h;
      }

      // Partner younger than the elapsed time: earlier-level face values.
      if (j > 0) {
        double s = 0.5 * bs[i + j] * inv_surv[j] * lower[j * nt + 0];
        for (std::size_t k = 1; k < j; ++k)
          s += bs[k + i] * inv_surv[k] * lower[k * nt + (j - k)];
        if (i > 0) s += 0.5 * bs[i] * inv_surv[0] * lower[0 * nt + j];
        acc += surv[i] * s * h;
      }

      // Partner older than the elapsed time: the t > a region tail.
      if (nda > 1) {
        if (separable) {
          acc += beta0 * surv[i] * surv[i] * col_sum[j];
        } else {
          double s = 0.0;
          for (std::size_t z = 0; z < nda; ++z) {
            const double w = (z == 0 || z == nda - 1) ? 0.5 : 1.0;
            s += w * bs[i + j + z] * inv_surv[j + z] * upper[z * nt + j];
          }
          acc += surv[i] * s * h;
        }
      }

      const bool self_coupled = (i > 0) || (j > 0);
      lower[i * nt + j] = self_coupled ? acc / diag : acc;
    }
  }

  MomentField2 f;
  f.h_ = h;
  f.horizon_ = horizon;
  f.nt_ = nt;
  f.nda_ = nda;
  f.lower_ = std::move(lower);
  f.upper_ = std::move(upper);
  f.surv_ = std::move(surv);
  f.init2_ = init2;
  f.init2_age_max_ = opt.init2_age_max;
  return f;
}

// ---------------------------------------------------------------------------

WindowMoments window_mean_var(const MomentField1& x1, const MomentField2& x2,
                              double w0, double w1, double t) {
  if (w0 < 0.0 || w1 < w0) throw std::invalid_argument("window_mean_var: bad window");
  const double mean = x1.window_integral(w0, w1, t);
  const double pair = x2.window_integral(w0, w1, t);
  return WindowMoments{mean, pair + mean - mean * mean};
}

YuleFurryValues yule_furry_closed(double lambda, double beta, double a,
                                  double b, double t) {
  if (!(lambda > 0.0) || beta < 0.0)
    throw std::invalid_argument("yule_furry_closed: bad parameters");
  if (a < 0.0 || t < 0.0 || !(a < b))
    throw std::domain_error("yule_furry_closed: need 0 <= a < b, t >= 0");

  YuleFurryValues v;
  v.x1 = (t < a) ? lambda * std::exp(-lambda * (a - t))
                 : beta * std::exp(beta * (t - a));
  if (t < a) {
    v.x2 = 0.0;
  } else if (t < b) {
    v.x2 = lambda * beta * std::exp(-lambda * (b - a)) *
           std::exp((lambda + beta) * (t - a));
  } else {
    v.x2 = 2.0 * beta * beta * std::exp(-beta * (b - a)) *
           std::exp(2.0 * beta * (t - a));
  }

  const double ela = std::exp(-lambda * a);
  const double elb = (std::isinf(b)) ? 0.0 : std::exp(-lambda * b);
  const double ebb = (std::isinf(b)) ? 0.0 : std::exp(-beta * b);
  if (t < a) {
    v.mean = std::exp(lambda * (t - a)) - std::exp(lambda * (t - b));
    v.variance = std::exp(2.0 * lambda * t) * (ela - elb) *
                 (-ela + elb + std::exp(-lambda * t));
  } else if (t < b) {
    const double e1 = std::exp(beta * (t - a));
    const double e2 = std::exp(lambda * (t - b));
    v.mean = e1 - e2;
    v.variance = (e1 - e2) * (e1 + e2 - 1.0);
  } else {
    const double eba = std::exp(-beta * a);
    v.mean = std::exp(beta * (t - a)) - std::exp(beta * (t - b));
    v.variance = std::exp(2.0 * beta * t) * (eba - ebb) *
                 (eba - ebb + std::exp(-beta * t));
  }
  return v;
}

}  // namespace agekin
