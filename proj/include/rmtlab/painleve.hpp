#pragma once

#include <Eigen/Core>

#include "rmtlab/stats.hpp"

namespace rmtlab {

/// sigma-form of Painleve V with theta_1 = theta_2 = -theta_3 = -theta_4 = -(g1+g2)/(2 sqrt2 i),
/// written on the ray s = -i r for tau(r) = sigma(-i r):
///   r^2 tau''^2 = 4 (b^2 - tau'^2)^2 - (tau - r tau' - 2 tau'^2)^2,  b = (g1+g2)/(2 sqrt2).
/// The solver integrates the differentiated (third-order) form, on which the
/// quadratic relation is a conserved first integral; this selects the branch of
/// tau'' by continuity.
struct SigmaPVSolution {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  Eigen::VectorXd r_grid;  // uniform grid on [r_min, r_max]
  Eigen::VectorXd sigma;
  Eigen::VectorXd sigma_prime;
  Eigen::VectorXd sigma_second;
  double shooting_param = 0.0;  // tau'(r_min)
};

struct SigmaPVOptions {
  double r_min = 1e-3;
  double r_max = 40.0;
  int grid_points = 4001;
  double rtol = 1e-10;
  double atol = 1e-12;
};

/// Right-hand side 4 (b^2 - tau'^2)^2 - (tau - r tau' - 2 tau'^2)^2 of the real form.
double sigma_pv_rhs(double gamma1, double gamma2, double r, double tau, double tau_prime);

/// Large-r line -(g1-g2)/(2 sqrt2) r + (g1-g2)^2/4 and small-r value (g1+g2)^2/4.
struct SigmaPVTargets {
  double slope;
  double intercept;
  double small_r_value;
};
SigmaPVTargets sigma_pv_targets(double gamma1, double gamma2);

/// One trajectory from tau(r_min) = (g1+g2)^2/4 + p r_min, tau'(r_min) = p, tau''(r_min) = 0.
/// `admissible` is false once |tau| > 10 (1 + |slope| r) or the stepper stalls;
/// the arrays then stop at the last accepted grid point. Throws BranchAmbiguity
/// for p = +-(g1+g2)/(2 sqrt2), where the start is a double root with tau''' = 0.
struct SigmaPVTrajectory {
  SigmaPVSolution solution;
  bool admissible = false;
  double exit_r = 0.0;
};
SigmaPVTrajectory shoot_sigma_pv(double gamma1, double gamma2, double p, const SigmaPVOptions& options = {});

/// Shooting on tau'(r_min). The exit diagnostic is the side of the large-r target
/// line on which the trajectory leaves [r_min, r_max] (blow-up or end of range);
/// a sign change is bracketed on an expanding grid and bisected, and the
/// admissible end of the final bracket is returned.
/// Throws DomainError (bad range or g1 == g2) and ShootingFailed (no sign change
/// of the exit diagnostic, or no admissible trajectory at the bracket).
SigmaPVSolution integrate_sigma_pv(double gamma1, double gamma2, const SigmaPVOptions& options = {});
SigmaPVSolution integrate_sigma_pv(double gamma1, double gamma2, double r_min, double r_max);

/// max_grid |r^2 tau''^2 - RHS| with tau'' from the quintic B-spline through the grid values of tau.
double residual(const SigmaPVSolution& solution);

/// Least squares line through (r, tau) for r in [r_max/2, r_max].
stats::LineFit fit_large_r(const SigmaPVSolution& solution);

}  // namespace rmtlab
