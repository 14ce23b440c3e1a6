#include "rmtlab/hankel.hpp"

#include <cmath>
#include <numbers>

namespace rmtlab {

namespace {

using hankel::Real;

template <typename F>
auto with_precision(int digits, F&& f) -> decltype(f(Real<50>())) {
  if (digits <= 50) return f(Real<50>());
  if (digits <= 100) return f(Real<100>());
  if (digits <= 200) return f(Real<200>());
  throw Error(ErrorKind::ConfigError, "at most 200 working digits are supported");
}

// Runs f at `digits`, then once more at twice the digits if precision ran out.
template <typename F>
auto with_retry(int digits, F&& f) -> decltype(f(Real<50>())) {
  try {
    return with_precision(digits, f);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::PrecisionExhausted || 2 * digits > 200) throw;
    return with_precision(2 * digits, f);
  }
}

template <typename R>
R log_det_at(const HankelSpec& spec, const PanelLayout& layout) {
  return hankel::log_det<R>(spec, layout).log_det;
}

}  // namespace

double log_hankel(const HankelSpec& spec, int digits, const PanelLayout& layout) {
  return with_retry(digits, [&](auto r) {
    using R = decltype(r);
    return static_cast<double>(log_det_at<R>(spec, layout));
  });
}

double log_exp_moment_exact(double x, double gamma, int n, const Potential& potential, int digits) {
  if (n < 1 || n > 12) throw Error(ErrorKind::NormalizationUnavailable, "exact exponential moments need 1 <= N <= 12");
  if (gamma == 0.0) return 0.0;
  const auto measure = solve_equilibrium(potential);
  HankelSpec jump;
  jump.n = n;
  jump.x1 = x;
  jump.x2 = x;
  jump.gamma1 = gamma;
  jump.potential = potential;
  HankelSpec plain = jump;
  plain.gamma1 = 0.0;
  return with_retry(digits, [&](auto r) {
    using R = decltype(r);
    const R ratio = log_det_at<R>(jump, {}) - log_det_at<R>(plain, {});
    return static_cast<double>(ratio - hankel::sqrt2pi<R>() * R(gamma) * R(n) * R(measure.cdf(x)));
  });
}

double exp_moment_exact(double x, double gamma, int n, const Potential& potential, int digits) {
  return std::exp(log_exp_moment_exact(x, gamma, n, potential, digits));
}

DiffIdCheck diffid_y_check(const HankelSpec& spec, double dy, int digits) {
  if (spec.n > 10) throw Error(ErrorKind::DomainError, "diffid_y_check supports N <= 10");
  if (!(spec.x1 < spec.x2)) throw Error(ErrorKind::DomainError, "diffid_y_check requires x1 < x2");
  return with_retry(digits, [&](auto r) {
    using R = decltype(r);
    using std::exp;
    HankelSpec up = spec, down = spec;
    up.x2 += dy;
    down.x2 -= dy;
    const R lhs = (log_det_at<R>(up, {}) - log_det_at<R>(down, {})) / (2 * R(dy));
    const auto basis = hankel::ortho_basis<R>(spec);
    const R x2(spec.x2);
    R kernel(0);
    for (int j = 0; j < spec.n; ++j) {
      const R p = basis.eval(j, x2);
      kernel += p * p;
    }
    R jump_left = hankel::smooth_log_weight(spec, x2);
    if (spec.gamma1 != 0.0 && x2 <= R(spec.x1)) jump_left += hankel::sqrt2pi<R>() * R(spec.gamma1);
    const R rhs = -exp(jump_left) * (1 - exp(hankel::sqrt2pi<R>() * R(spec.gamma2))) * kernel;
    DiffIdCheck c;
    c.lhs = static_cast<double>(lhs);
    c.rhs = static_cast<double>(rhs);
    c.gap = static_cast<double>(abs(lhs - rhs));
    return c;
  });
}

double predict_single_jump(double x, double gamma, int n, const EquilibriumMeasure& measure, double m) {
  if (std::abs(x) > 1.0 - m * std::pow(static_cast<double>(n), -2.0 / 3.0)) {
    throw Error(ErrorKind::EdgeTooClose, "|x| exceeds 1 - m N^(-2/3)");
  }
  const double s = std::sqrt(2.0) * std::numbers::pi;
  return s * gamma * n * measure.cdf(x) + 0.5 * gamma * gamma * std::log(static_cast<double>(n)) +
         0.75 * gamma * gamma * std::log(1.0 - x * x);
}

double predict_merging_jumps(double x1, double x2, double gamma1, double gamma2, int n,
                             const EquilibriumMeasure& measure) {
  const double s = std::sqrt(2.0) * std::numbers::pi;
  const double mass = measure.cdf(std::max(x1, x2)) - measure.cdf(std::min(x1, x2));
  return s * gamma2 * n * mass - gamma1 * gamma2 * std::max(0.0, std::log(std::abs(x1 - x2) * n));
}

double predict_smooth_perturbation(double x1, double x2, double gamma1, double gamma2, const Eigen::VectorXd& w_cheb,
                                   int n, const EquilibriumMeasure& measure) {
  if (w_cheb.size() == 0) return 0.0;
  auto w = [&](double t) { return cheb::eval_t(w_cheb, t); };
  double s = n * measure.integrate(w, 512) + 0.5 * sigma_variance(w).value;
  for (auto [x, g] : {std::pair{x1, gamma1}, std::pair{x2, gamma2}}) {
    if (g != 0.0) s += g / std::sqrt(2.0) * std::sqrt(1.0 - x * x) * finite_hilbert(w, x);
  }
  return s;
}

}  // namespace rmtlab
