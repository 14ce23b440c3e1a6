#include "rmtlab/painleve.hpp"

#include <array>
#include <boost/math/interpolators/cardinal_quintic_b_spline.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <vector>

#include "rmtlab/errors.hpp"

namespace rmtlab {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 3>;

double beta_of(double g1, double g2) { return (g1 + g2) / (2.0 * std::sqrt(2.0)); }

struct Exit {
  double r;
};

Eigen::VectorXd uniform_grid(const SigmaPVOptions& o) {
  Eigen::VectorXd r = Eigen::VectorXd::LinSpaced(o.grid_points, o.r_min, o.r_max);
  r(o.grid_points - 1) = o.r_max;
  return r;
}

void validate(double g1, double g2, const SigmaPVOptions& o) {
  if (!(o.r_min > 0.0 && o.r_min < 1.0 && o.r_max > 1.0)) {
    throw Error(ErrorKind::DomainError, "sigma-PV needs 0 < r_min < 1 < r_max");
  }
  if (o.grid_points < 16) throw Error(ErrorKind::DomainError, "sigma-PV grid needs at least 16 points");
  if (g1 == g2) throw Error(ErrorKind::DomainError, "sigma-PV needs gamma1 != gamma2");
}

}  // namespace

double sigma_pv_rhs(double gamma1, double gamma2, double r, double tau, double tau_prime) {
  const double b2 = beta_of(gamma1, gamma2) * beta_of(gamma1, gamma2);
  const double q = b2 - tau_prime * tau_prime;
  const double u = tau - r * tau_prime - 2.0 * tau_prime * tau_prime;
  return 4.0 * q * q - u * u;
}

SigmaPVTargets sigma_pv_targets(double gamma1, double gamma2) {
  const double d = gamma1 - gamma2, s = gamma1 + gamma2;
  return {-d / (2.0 * std::sqrt(2.0)), d * d / 4.0, s * s / 4.0};
}

SigmaPVTrajectory shoot_sigma_pv(double gamma1, double gamma2, double p, const SigmaPVOptions& options) {
  validate(gamma1, gamma2, options);
  const double b2 = beta_of(gamma1, gamma2) * beta_of(gamma1, gamma2);
  if (std::abs(p * p - b2) < 1e-12) {
    // the start is a double root of the quadratic in tau'' and tau''' vanishes there too
    throw Error(ErrorKind::BranchAmbiguity, "tau'(r_min) = +-(g1+g2)/(2 sqrt2) leaves the branch of tau'' undetermined");
  }
  const double slope = std::abs(sigma_pv_targets(gamma1, gamma2).slope);
  auto bound = [&](double r) { return 10.0 * (1.0 + slope * r); };

  auto system = [&](const State& y, State& dy, double r) {
    const double t = y[0], t1 = y[1], t2 = y[2];
    if (!std::isfinite(t) || std::abs(t) > 4.0 * bound(r)) throw Exit{r};
    const double u = t - r * t1 - 2.0 * t1 * t1;
    dy[0] = t1;
    dy[1] = t2;
    dy[2] = (-8.0 * (b2 - t1 * t1) * t1 + u * (r + 4.0 * t1) - r * t2) / (r * r);
  };

  const Eigen::VectorXd grid = uniform_grid(options);
  std::vector<double> rs, ts, t1s, t2s;
  rs.reserve(grid.size());
  auto observer = [&](const State& y, double r) {
    if (!std::isfinite(y[0]) || std::abs(y[0]) > bound(r)) throw Exit{r};
    rs.push_back(r);
    ts.push_back(y[0]);
    t1s.push_back(y[1]);
    t2s.push_back(y[2]);
  };

  SigmaPVTrajectory out;
  // start on the exact line tau = (g1+g2)^2/4 + p r, where the quadratic relation holds with tau'' = 0
  State y = {sigma_pv_targets(gamma1, gamma2).small_r_value + p * options.r_min, p, 0.0};
  auto stepper = odeint::make_controlled(options.atol, options.rtol, odeint::runge_kutta_dopri5<State>());
  try {
    odeint::integrate_times(stepper, system, y, grid.data(), grid.data() + grid.size(), 1e-2 * options.r_min,
                            observer, odeint::max_step_checker(20000));
    out.admissible = true;
    out.exit_r = options.r_max;
  } catch (const Exit& e) {
    out.exit_r = e.r;
  } catch (const odeint::step_adjustment_error&) {
    out.exit_r = rs.empty() ? options.r_min : rs.back();
  } catch (const odeint::no_progress_error&) {
    out.exit_r = rs.empty() ? options.r_min : rs.back();
  }

  auto& s = out.solution;
  s.gamma1 = gamma1;
  s.gamma2 = gamma2;
  s.shooting_param = p;
  const auto m = static_cast<Eigen::Index>(rs.size());
  s.r_grid = Eigen::Map<Eigen::VectorXd>(rs.data(), m);
  s.sigma = Eigen::Map<Eigen::VectorXd>(ts.data(), m);
  s.sigma_prime = Eigen::Map<Eigen::VectorXd>(t1s.data(), m);
  s.sigma_second = Eigen::Map<Eigen::VectorXd>(t2s.data(), m);
  return out;
}

SigmaPVSolution integrate_sigma_pv(double gamma1, double gamma2, const SigmaPVOptions& options) {
  validate(gamma1, gamma2, options);
  const double b = std::abs(beta_of(gamma1, gamma2));
  const auto target = sigma_pv_targets(gamma1, gamma2);
  // exit diagnostic: side of the large-r target line on which the trajectory leaves
  auto above = [&](double p) {
    const auto s = shoot_sigma_pv(gamma1, gamma2, p, options).solution;
    const Eigen::Index last = s.r_grid.size() - 1;
    if (last < 0) return false;
    return s.sigma(last) > target.slope * s.r_grid(last) + target.intercept;
  };
  auto above_scan = [&](double p) { return above(std::abs(p * p - b * b) < 1e-12 ? p + 1e-9 : p); };

  double lo = 0.0, hi = 0.0;  // lo exits below the line, hi above
  bool found = false;
  for (double half = 1.0; half <= 64.0 && !found; half *= 2.0) {
    const int cells = 16;
    double prev_p = -half;
    bool prev_above = above_scan(prev_p);
    for (int i = 1; i <= cells && !found; ++i) {
      const double p = -half + 2.0 * half * i / cells;
      const bool cur = above_scan(p);
      if (cur != prev_above) {
        lo = cur ? prev_p : p;
        hi = cur ? p : prev_p;
        found = true;
      }
      prev_p = p;
      prev_above = cur;
    }
  }
  if (!found) throw Error(ErrorKind::ShootingFailed, "exit diagnostic keeps one sign for shooting parameters in [-64, 64]");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (above(mid) ? hi : lo) = mid;
  }
  for (double p : {hi, lo}) {
    auto t = shoot_sigma_pv(gamma1, gamma2, p, options);
    if (t.admissible) return t.solution;
  }
  throw Error(ErrorKind::ShootingFailed, "no admissible trajectory at the bracketed shooting parameter");
}

SigmaPVSolution integrate_sigma_pv(double gamma1, double gamma2, double r_min, double r_max) {
  SigmaPVOptions o;
  o.r_min = r_min;
  o.r_max = r_max;
  return integrate_sigma_pv(gamma1, gamma2, o);
}

double residual(const SigmaPVSolution& s) {
  const Eigen::Index n = s.r_grid.size();
  if (n < 8) throw Error(ErrorKind::DomainError, "residual needs at least 8 grid points");
  const double r0 = s.r_grid(0), h = (s.r_grid(n - 1) - r0) / (n - 1);
  boost::math::interpolators::cardinal_quintic_b_spline<double> spline(s.sigma.data(), static_cast<std::size_t>(n), r0, h);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = s.r_grid(i);
    // stay inside the spline domain at the right end
    const double at = i + 1 == n ? std::nextafter(r0 + h * i, r0) : r0 + h * i;
    const double tpp = spline.double_prime(at);
    worst = std::max(worst, std::abs(r * r * tpp * tpp - sigma_pv_rhs(s.gamma1, s.gamma2, r, s.sigma(i), s.sigma_prime(i))));
  }
  return worst;
}

stats::LineFit fit_large_r(const SigmaPVSolution& s) {
  const double r_max = s.r_grid(s.r_grid.size() - 1);
  std::vector<double> x, y;
  for (Eigen::Index i = 0; i < s.r_grid.size(); ++i) {
    if (s.r_grid(i) >= 0.5 * r_max) {
      x.push_back(s.r_grid(i));
      y.push_back(s.sigma(i));
    }
  }
  return stats::fit_line(x, y);
}

}  // namespace rmtlab
