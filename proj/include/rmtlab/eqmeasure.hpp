#pragma once

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

#include "rmtlab/chebyshev.hpp"
#include "rmtlab/quadrature.hpp"

namespace rmtlab {

/// Analytic confining potential, stored as Chebyshev-T series for both V and
/// V'. The series are polynomials, so they evaluate on the whole real line.
class Potential {
 public:
  Potential() = default;

  /// Builds V from the T-coefficients c_0..c_K of V' (V(0) = 0).
  static Potential from_derivative_cheb(std::string name, Eigen::VectorXd deriv_cheb);
  /// V(x) = 2x^2, the Gaussian unitary ensemble.
  static Potential gue();
  /// V(x) = (ax)^4 + (ax)^2 with a > 0 fixed numerically so that c_1 = 4.
  static Potential quartic();
  /// "gue" or "quartic"; throws ConfigError otherwise.
  static Potential by_name(const std::string& name);

  const std::string& name() const { return name_; }
  /// c_0..c_K for V'.
  const Eigen::VectorXd& deriv_cheb() const { return deriv_cheb_; }
  const Eigen::VectorXd& value_cheb() const { return value_cheb_; }
  int order() const { return static_cast<int>(deriv_cheb_.size()) - 1; }

  template <typename Scalar>
  Scalar evaluate(const Scalar& x) const {
    return cheb::eval_t(value_cheb_, x);
  }
  double operator()(double x) const { return evaluate(x); }
  double derivative(double x) const { return cheb::eval_t(deriv_cheb_, x); }

 private:
  std::string name_;
  Eigen::VectorXd deriv_cheb_;
  Eigen::VectorXd value_cheb_;
};

/// Equilibrium measure on [-1,1]: dmu/dx = psi(x) sqrt(1-x^2) with
/// psi = sum_k d_k U_k.
class EquilibriumMeasure {
 public:
  EquilibriumMeasure(Potential potential, Eigen::VectorXd density_cheb);

  const Potential& potential() const { return potential_; }
  const std::string& potential_name() const { return potential_.name(); }
  /// d_0..d_{K-1}, U-basis coefficients of psi.
  const Eigen::VectorXd& density_cheb() const { return density_cheb_; }

  double psi(double x) const { return cheb::eval_u(density_cheb_, x); }
  /// psi(x) sqrt(1-x^2) on [-1,1], zero outside.
  double density(double x) const;
  /// F(x) = mu((-inf, x]); 0 left of -1, 1 right of 1.
  double cdf(double x) const;
  /// F(cos theta) for theta in [0, pi].
  double cdf_theta(double theta) const;
  /// Smallest x in [-1,1] with F(x) = u, for u in [0,1].
  double quantile(double u) const;
  /// Same, restricted to a theta bracket known to contain the root.
  double quantile_in(double u, double x_lo, double x_hi) const;

  /// int log|x-t| dmu(t).
  double log_potential(double x) const;
  /// Moments int T_k dmu for k = 0..K+1.
  const Eigen::VectorXd& chebyshev_moments() const { return moments_; }

  double lagrange_ell() const { return ell_; }
  double edge_c_minus() const { return c_minus_; }
  double edge_c_plus() const { return c_plus_; }

  /// int f dmu by second-kind Gauss-Chebyshev with n nodes.
  template <typename F>
  double integrate(F&& f, int n = 256) const;

 private:
  Potential potential_;
  Eigen::VectorXd density_cheb_;
  Eigen::VectorXd moments_;
  double ell_ = 0.0;
  double c_minus_ = 0.0;
  double c_plus_ = 0.0;
};

/// Solves the Euler-Lagrange problem for a potential normalized to support
/// [-1,1]. Throws BadNormalization when c_1 != 4 (or c_0 != 0) and NotOneCut
/// when psi fails to be positive or the outer inequality fails at x = +-1.5.
EquilibriumMeasure solve_equilibrium(const Potential& potential);

struct QuantileTable {
  int n = 0;
  std::vector<double> kappa;  // kappa_1..kappa_N, kappa_N = 1
};

QuantileTable quantiles(const EquilibriumMeasure& measure, int n);

/// (Uf)(x) = (1/pi) PV int f(t)/(x-t) dt/sqrt(1-t^2). Node count doubles from
/// `nodes` until two levels agree to 1e-9. Throws DomainError for |x| >= 1.
double finite_hilbert(const std::function<double(double)>& f, double x, int nodes = 512);

struct VarianceEstimate {
  double value;        // Fourier-Chebyshev series
  double hilbert;      // -(1/2pi) int f' (Ug) sqrt(1-t^2)
  double discrepancy;  // |value - hilbert|
};

/// sigma^2(f; g) by both routes. Throws CrossCheckFailure if they disagree by
/// more than `tolerance`.
VarianceEstimate sigma_bilinear(const std::function<double(double)>& f,
                                const std::function<double(double)>& g, double tolerance = 1e-8);
VarianceEstimate sigma_variance(const std::function<double(double)>& f, double tolerance = 1e-8);

/// Fourier-Chebyshev coefficients fhat_0..fhat_{n-1} of f (fhat_k = (2/pi) int f T_k / sqrt(1-x^2)).
Eigen::VectorXd fourier_chebyshev(const std::function<double(double)>& f, int n = 128);

template <typename F>
double EquilibriumMeasure::integrate(F&& f, int n) const {
  return quad::integrate_semicircle_weight([&](double t) { return f(t) * psi(t); }, n);
}

}  // namespace rmtlab
