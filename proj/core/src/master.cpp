#include "agekin/master.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace agekin {

double MasterState::mean() const {
  double m = 0.0;
  for (std::size_t n = 0; n < pmf.size(); ++n) m += static_cast<double>(n) * pmf[n];
  return m;
}

double MasterState::variance() const {
  const double m = mean();
  double s = 0.0;
  for (std::size_t n = 0; n < pmf.size(); ++n) {
    const double d = static_cast<double>(n) - m;
    s += d * d * pmf[n];
  }
  return s;
}

double MasterState::mass() const {
  double s = 0.0;
  for (double p : pmf) s += p;
  return s;
}

MasterState MasterState::delta(std::size_t n, std::size_t n_max) {
  if (n > n_max) throw std::invalid_argument("MasterState: n > n_max");
  MasterState st;
  st.pmf.assign(n_max + 1, 0.0);
  st.pmf[n] = 1.0;
  return st;
}

const MasterState& MasterTrajectory::at_time(double t, double tol) const {
  for (const auto& s : states)
    if (std::abs(s.time - t) <= tol) return s;
  throw std::invalid_argument("MasterTrajectory: time not among outputs");
}

MasterTrajectory master_evolve(const std::function<double(std::size_t)>& beta_n,
                               const std::function<double(std::size_t)>& mu_n,
                               const MasterState& init,
                               const std::vector<double>& output_times,
                               const MasterOptions& opt) {
  using state_t = std::vector<double>;
  namespace ode = boost::numeric::odeint;

  if (init.pmf.empty()) throw std::invalid_argument("master_evolve: empty pmf");
  const std::size_t n_max = init.pmf.size() - 1;

  // Cache the per-capita rates; they are time-independent here.
  std::vector<double> b(n_max + 1), d(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) {
    b[n] = beta_n(n);
    d[n] = mu_n(n);
    if (b[n] < 0.0 || d[n] < 0.0)
      throw std::invalid_argument("master_evolve: negative rate");
  }

  const auto rhs = [&](const state_t& p, state_t& dpdt, double /*t*/) {
    for (std::size_t n = 0; n <= n_max; ++n) {
      const double nn = static_cast<double>(n);
      double v = -nn * (b[n] + d[n]) * p[n];
      if (n > 0) v += (nn - 1.0) * b[n - 1] * p[n - 1];
      if (n < n_max) v += (nn + 1.0) * d[n + 1] * p[n + 1];
      dpdt[n] = v;
    }
    // No gain into n_max+1: births out of the top state are suppressed so
    // probability is conserved; the top-state mass is monitored instead.
    dpdt[n_max] += static_cast<double>(n_max) * b[n_max] * p[n_max];
  };

  std::vector<double> times = output_times;
  std::sort(times.begin(), times.end());
  if (times.empty() || times.front() < init.time)
    throw std::invalid_argument("master_evolve: bad output times");
  if (times.front() > init.time) times.insert(times.begin(), init.time);

  MasterTrajectory traj;
  state_t p = init.pmf;
  auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<state_t>>(
      opt.abs_tol, opt.rel_tol);

  double t_cur = init.time;
  for (double t_out : times) {
    if (t_out > t_cur) {
      ode::integrate_adaptive(stepper, rhs, p, t_cur, t_out,
                              (t_out - t_cur) / 100.0);
      t_cur = t_out;
    }
    MasterState s;
    s.pmf = p;
    s.time = t_out;
    traj.max_boundary_mass = std::max(traj.max_boundary_mass, p[n_max]);
    traj.states.push_back(std::move(s));
  }
  traj.truncation_warning = traj.max_boundary_mass > opt.leakage_tol;
  return traj;
}

std::size_t master_default_nmax(double mean0, double net_growth_rate,
                                double horizon) {
  const double mean_h = mean0 * std::exp(std::max(0.0, net_growth_rate) * horizon);
  return static_cast<std::size_t>(std::ceil(8.0 * std::max(1.0, mean_h)));
}

}  // namespace agekin
