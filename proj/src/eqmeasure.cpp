#include "rmtlab/eqmeasure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rmtlab/errors.hpp"

namespace rmtlab {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

Potential Potential::from_derivative_cheb(std::string name, Eigen::VectorXd deriv_cheb) {
  Potential p;
  p.name_ = std::move(name);
  p.deriv_cheb_ = std::move(deriv_cheb);
  p.value_cheb_ = cheb::antiderivative(p.deriv_cheb_);
  return p;
}

Potential Potential::gue() {
  Eigen::VectorXd c(2);
  c << 0.0, 4.0;
  return from_derivative_cheb("gue", c);
}

Potential Potential::quartic() {
  // T_1 coefficient of d/dx[(ax)^4 + (ax)^2] is 3a^4 + 2a^2; solve = 4 for s = a^2.
  double lo = 0.0, hi = 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (3 * mid * mid + 2 * mid < 4.0 ? lo : hi) = mid;
  }
  const double a = std::sqrt(0.5 * (lo + hi));
  auto vprime = [a](double x) {
    const double y = a * x;
    return a * (4 * y * y * y + 2 * y);
  };
  Eigen::VectorXd c = cheb::trim(cheb::interpolate(vprime, 16), 1e-14);
  c(0) = 0.0;  // odd by construction
  for (Eigen::Index k = 2; k < c.size(); k += 2) c(k) = 0.0;
  return from_derivative_cheb("quartic", c);
}

Potential Potential::by_name(const std::string& name) {
  if (name == "gue") return gue();
  if (name == "quartic") return quartic();
  throw Error(ErrorKind::ConfigError, "unknown potential '" + name + "'");
}

EquilibriumMeasure::EquilibriumMeasure(Potential potential, Eigen::VectorXd density_cheb)
    : potential_(std::move(potential)), density_cheb_(std::move(density_cheb)) {
  const Eigen::Index k = density_cheb_.size();
  moments_ = Eigen::VectorXd::Zero(k + 2);
  // int T_k U_j sqrt(1-t^2) dt = (pi/4) [delta_{kj}(1 + delta_{k0}) - delta_{k,j+2}]
  for (Eigen::Index m = 0; m < k + 2; ++m) {
    double s = 0.0;
    if (m < k) s += density_cheb_(m) * (m == 0 ? 2.0 : 1.0);
    if (m >= 2 && m - 2 < k) s -= density_cheb_(m - 2);
    moments_(m) = 0.25 * kPi * s;
  }
  ell_ = potential_(0.0) - 2.0 * log_potential(0.0);
  const double pm = psi(-1.0), pp = psi(1.0);
  c_minus_ = std::pow(3.0 / (2.0 * std::sqrt(2.0) * pm), 2.0 / 3.0);
  c_plus_ = std::pow(3.0 / (2.0 * std::sqrt(2.0) * pp), 2.0 / 3.0);
}

double EquilibriumMeasure::density(double x) const {
  if (x <= -1.0 || x >= 1.0) return 0.0;
  return psi(x) * std::sqrt((1.0 - x) * (1.0 + x));
}

double EquilibriumMeasure::cdf_theta(double theta) const {
  // int_theta^pi sin(k phi) sin(phi) dphi for the U_{k-1} sqrt(1-x^2) term
  double s = 0.0;
  const Eigen::Index n = density_cheb_.size();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double k = static_cast<double>(j + 1);
    double term;
    if (j == 0) {
      term = 0.5 * (kPi - theta + 0.5 * std::sin(2.0 * theta));
    } else {
      term = -0.5 * (std::sin((k - 1) * theta) / (k - 1) - std::sin((k + 1) * theta) / (k + 1));
    }
    s += density_cheb_(j) * term;
  }
  return s;
}

double EquilibriumMeasure::cdf(double x) const {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return std::clamp(cdf_theta(std::acos(x)), 0.0, 1.0);
}

double EquilibriumMeasure::quantile_in(double u, double x_lo, double x_hi) const {
  if (u <= 0.0) return -1.0;
  if (u >= 1.0) return 1.0;
  // F(cos theta) decreases in theta; G(theta) = F(cos theta) - u.
  double lo = std::acos(std::clamp(x_hi, -1.0, 1.0));
  double hi = std::acos(std::clamp(x_lo, -1.0, 1.0));
  double g_lo = cdf_theta(lo) - u, g_hi = cdf_theta(hi) - u;
  if (g_lo < 0.0 || g_hi > 0.0) {
    lo = 0.0;
    hi = kPi;
  }
  double th = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double g = cdf_theta(th) - u;
    if (g == 0.0) break;
    (g > 0.0 ? lo : hi) = th;
    const double dg = -psi(std::cos(th)) * std::sin(th) * std::sin(th);
    double next = (dg != 0.0) ? th - g / dg : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - th) <= 1e-16 * std::max(1.0, th) || hi - lo <= 1e-16) {
      th = next;
      break;
    }
    th = next;
  }
  return std::cos(th);
}

double EquilibriumMeasure::quantile(double u) const { return quantile_in(u, -1.0, 1.0); }

double EquilibriumMeasure::log_potential(double x) const {
  const Eigen::Index n = moments_.size();
  if (std::abs(x) <= 1.0) {
    // log|x-t| = -log 2 - sum_k (2/k) T_k(x) T_k(t) on [-1,1]^2
    double s = -std::log(2.0) * moments_(0);
    for (Eigen::Index k = 1; k < n; ++k) s -= 2.0 / k * cheb::t_poly(static_cast<int>(k), x) * moments_(k);
    return s;
  }
  // |x| > 1: log|x-t| = log(J/2) - sum_k (2/k) J^{-k} T_k(sign(x) t), J = |x| + sqrt(x^2-1)
  const double ax = std::abs(x);
  const double j = ax + std::sqrt(ax * ax - 1.0);
  const double sgn = x > 0 ? 1.0 : -1.0;
  double s = std::log(0.5 * j) * moments_(0);
  double jk = 1.0;
  for (Eigen::Index k = 1; k < n; ++k) {
    jk /= j;
    s -= 2.0 / k * jk * std::pow(sgn, static_cast<double>(k)) * moments_(k);
  }
  return s;
}

EquilibriumMeasure solve_equilibrium(const Potential& potential) {
  const Eigen::VectorXd& c = potential.deriv_cheb();
  if (c.size() < 2) throw Error(ErrorKind::BadNormalization, "V' has no T_1 component");
  if (std::abs(c(1) - 4.0) > 1e-6) {
    throw Error(ErrorKind::BadNormalization,
                "c_1 = " + std::to_string(c(1)) + " (support [-1,1] requires c_1 = 4)");
  }
  if (std::abs(c(0)) > 1e-6) {
    throw Error(ErrorKind::BadNormalization, "V' has a T_0 component; support is not [-1,1]");
  }
  const Eigen::VectorXd& v = potential.value_cheb();
  Eigen::Index deg = v.size() - 1;
  while (deg > 0 && v(deg) == 0.0) --deg;
  if (deg < 2 || deg % 2 != 0 || v(deg) <= 0.0) {
    throw Error(ErrorKind::NotOneCut, "potential is not confining");
  }

  Eigen::VectorXd d(c.size() - 1);
  for (Eigen::Index k = 1; k < c.size(); ++k) d(k - 1) = c(k) / (2.0 * kPi);

  EquilibriumMeasure m(potential, d);

  for (int i = 0; i < 1000; ++i) {
    const double x = -1.0 + 2.0 * i / 999.0;
    if (!(m.psi(x) > 0.0)) {
      throw Error(ErrorKind::NotOneCut, "psi_V <= 0 at x = " + std::to_string(x));
    }
  }
  for (double x : {-1.5, 1.5}) {
    const double lhs = 2.0 * m.log_potential(x) - potential(x);
    if (lhs > -m.lagrange_ell() + 1e-10) {
      throw Error(ErrorKind::NotOneCut, "Euler-Lagrange inequality fails at x = " + std::to_string(x));
    }
  }
  return m;
}

QuantileTable quantiles(const EquilibriumMeasure& measure, int n) {
  if (n < 1) throw Error(ErrorKind::DomainError, "quantiles: N must be >= 1");
  QuantileTable t;
  t.n = n;
  t.kappa.resize(n);
  double prev = -1.0;
  for (int j = 1; j < n; ++j) {
    prev = measure.quantile_in(static_cast<double>(j) / n, prev, 1.0);
    t.kappa[j - 1] = prev;
  }
  t.kappa[n - 1] = 1.0;
  return t;
}

namespace {

double hilbert_at_level(const std::function<double(double)>& f, double theta, int n) {
  const double c = std::cos(theta);
  const double a = std::min(theta, kPi - theta);
  // Symmetric pairs phi = theta +- u, u in (0, a); the 1/u parts cancel in the sum.
  auto paired = [&](double u) {
    const double s2 = std::sin(0.5 * u);
    const double plus = f(std::cos(theta + u)) / (2.0 * std::sin(theta + 0.5 * u) * s2);
    const double minus = f(std::cos(theta - u)) / (2.0 * std::sin(theta - 0.5 * u) * s2);
    return plus - minus;
  };
  double s = quad::integrate<double>(paired, 0.0, a, n);
  auto plain = [&](double phi) { return f(std::cos(phi)) / (c - std::cos(phi)); };
  if (theta < 0.5 * kPi) {
    if (kPi - 2.0 * theta > 0.0) s += quad::integrate<double>(plain, 2.0 * theta, kPi, n);
  } else {
    if (2.0 * theta - kPi > 0.0) s += quad::integrate<double>(plain, 0.0, 2.0 * theta - kPi, n);
  }
  return s / kPi;
}

}  // namespace

double finite_hilbert(const std::function<double(double)>& f, double x, int nodes) {
  if (!(std::abs(x) < 1.0)) throw Error(ErrorKind::DomainError, "finite_hilbert requires |x| < 1");
  const double theta = std::acos(x);
  double prev = hilbert_at_level(f, theta, nodes);
  for (int n = 2 * nodes; n <= (1 << 16); n *= 2) {
    const double cur = hilbert_at_level(f, theta, n);
    if (std::abs(cur - prev) <= 1e-9 * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

Eigen::VectorXd fourier_chebyshev(const std::function<double(double)>& f, int n) {
  Eigen::VectorXd c = cheb::interpolate(f, n);
  c(0) *= 2.0;  // fhat_0 = (2/pi) int f / sqrt(1-x^2)
  return c;
}

VarianceEstimate sigma_bilinear(const std::function<double(double)>& f,
                                const std::function<double(double)>& g, double tolerance) {
  constexpr int kCoeffs = 128;
  const Eigen::VectorXd fh = fourier_chebyshev(f, kCoeffs);
  const Eigen::VectorXd gh = fourier_chebyshev(g, kCoeffs);
  double series = 0.0;
  for (int k = 1; k < kCoeffs; ++k) series += k * fh(k) * gh(k);
  series *= 0.25;

  // f' from the T-series of f (interpolant), U g from PV quadrature of g itself.
  Eigen::VectorXd fc = fh;
  fc(0) *= 0.5;
  const Eigen::VectorXd dfc = cheb::derivative(fc);
  const double integral = quad::integrate_semicircle_weight(
      [&](double t) { return cheb::eval_t(dfc, t) * finite_hilbert(g, t); }, 64);
  const double hilbert = -integral / (2.0 * kPi);

  VarianceEstimate est{series, hilbert, std::abs(series - hilbert)};
  if (est.discrepancy > tolerance * std::max(1.0, std::abs(series))) {
    throw Error(ErrorKind::CrossCheckFailure, "variance routes disagree by " + std::to_string(est.discrepancy));
  }
  return est;
}

VarianceEstimate sigma_variance(const std::function<double(double)>& f, double tolerance) {
  return sigma_bilinear(f, f, tolerance);
}

}  // namespace rmtlab
