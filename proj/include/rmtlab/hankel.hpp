#pragma once

#include <Eigen/Core>
#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "rmtlab/chebyshev.hpp"
#include "rmtlab/eqmeasure.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/quadrature.hpp"

namespace rmtlab {

/// Weight h(l) = exp(sqrt2 pi g1 1{l<=x1} + sqrt2 pi g2 1{l<=x2} + w(l) - N V(l)),
/// with w given by Chebyshev-T coefficients (empty means w = 0).
struct HankelSpec {
  int n = 1;
  double x1 = 0.0;
  double x2 = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  Eigen::VectorXd w_cheb;
  Potential potential = Potential::gue();
};

/// Piecewise Gauss-Legendre layout for the moment integrals.
struct PanelLayout {
  double max_width = 0.25;
  double shift = 0.0;  // offsets the subdivision of each smooth piece
  int order = 0;       // 0: chosen from the working precision
};

namespace hankel {

template <unsigned Digits>
using Real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<Digits>,
                                           boost::multiprecision::et_off>;

template <typename R>
using Vec = Eigen::Matrix<R, Eigen::Dynamic, 1>;
template <typename R>
using Mat = Eigen::Matrix<R, Eigen::Dynamic, Eigen::Dynamic>;

template <typename R>
int digits10() {
  return std::numeric_limits<R>::digits10;
}

template <typename R>
R sqrt2pi() {
  using std::sqrt;
  return sqrt(R(2)) * boost::math::constants::pi<R>();
}

/// w(x) - N V(x), the jump-free part of log h.
template <typename R>
R smooth_log_weight(const HankelSpec& spec, const R& x) {
  R s = -R(spec.n) * spec.potential.evaluate(x);
  if (spec.w_cheb.size() > 0) s += cheb::eval_t(spec.w_cheb, x);
  return s;
}

/// Half-width A of the integration window: the integrand bound at |l| >= A is
/// below 10^-(digits+8).
inline double tail_cutoff(const HankelSpec& spec, int moments, int digits) {
  const double slack = std::sqrt(2.0) * std::numbers::pi * (std::abs(spec.gamma1) + std::abs(spec.gamma2));
  const double target = (digits + 8) * std::log(10.0);
  auto w = [&](double x) { return spec.w_cheb.size() > 0 ? cheb::eval_t(spec.w_cheb, x) : 0.0; };
  for (double a = 1.5; a <= 60.0; a += 0.25) {
    bool ok = true;
    for (double s : {-1.0, 1.0}) {
      const double x = s * a;
      const double expo = spec.n * spec.potential(x) - w(x) - moments * std::log(a) - slack - std::log(a);
      if (expo < target) ok = false;
    }
    if (ok) return a;
  }
  throw Error(ErrorKind::DomainError, "weight does not decay fast enough for the moment quadrature");
}

/// Moments m_k = int l^k h(l) dl, k = 0..count-1.
template <typename R>
Vec<R> moments(const HankelSpec& spec, int count, const PanelLayout& layout = {}) {
  const int digits = digits10<R>();
  const double a = tail_cutoff(spec, count, digits);
  std::vector<double> breaks = {-a, -1.0, 1.0, a};
  for (double x : {spec.x1, spec.x2}) {
    if (x > -a && x < a) breaks.push_back(x);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const int order = layout.order > 0 ? layout.order : std::max(40, 3 * digits / 4 + 10);
  const auto& rule = quad::gauss_legendre<R>(order);

  Vec<R> m = Vec<R>::Zero(count);
  auto panel = [&](const R& lo, const R& hi) {
    const R half = (hi - lo) / 2, mid = (hi + lo) / 2;
    // the jump sits at a panel boundary; evaluate the indicator at the panel midpoint
    for (int i = 0; i < order; ++i) {
      const R x = mid + half * rule.nodes(i);
      R lw = smooth_log_weight(spec, x);
      if (spec.gamma1 != 0.0 && mid <= R(spec.x1)) lw += sqrt2pi<R>() * R(spec.gamma1);
      if (spec.gamma2 != 0.0 && mid <= R(spec.x2)) lw += sqrt2pi<R>() * R(spec.gamma2);
      using std::exp;
      R term = rule.weights(i) * half * exp(lw);
      for (int k = 0; k < count; ++k) {
        m(k) += term;
        term *= x;
      }
    }
  };
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double lo = breaks[p], hi = breaks[p + 1];
    const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / layout.max_width)));
    std::vector<R> cuts;
    cuts.push_back(R(lo));
    const R h = (R(hi) - R(lo)) / pieces;
    for (int q = 1; q < pieces; ++q) cuts.push_back(R(lo) + h * (q + R(layout.shift)));
    cuts.push_back(R(hi));
    for (std::size_t q = 0; q + 1 < cuts.size(); ++q) panel(cuts[q], cuts[q + 1]);
  }
  return m;
}

template <typename R>
Mat<R> hankel_matrix(const Vec<R>& m, int n, int offset = 0) {
  Mat<R> h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h(i, j) = m(i + j + offset);
  return h;
}

template <typename R>
struct Determinant {
  R log_det;
  double condition;  // 1-norm condition number of the moment matrix
};

/// log det[m_{i+j}] by partially pivoted LU. Throws PrecisionExhausted if more
/// than half the working digits are lost or the determinant is not positive.
template <typename R>
Determinant<R> log_det(const HankelSpec& spec, const PanelLayout& layout = {}) {
  if (spec.n < 1) throw Error(ErrorKind::DomainError, "Hankel size N must be >= 1");
  const Vec<R> m = moments<R>(spec, 2 * spec.n - 1, layout);
  const Mat<R> h = hankel_matrix(m, spec.n);
  Eigen::PartialPivLU<Mat<R>> lu(h);
  const Mat<R> inv = lu.inverse();
  const double condition = static_cast<double>(h.cwiseAbs().colwise().sum().maxCoeff() *
                                               inv.cwiseAbs().colwise().sum().maxCoeff());
  const R det = lu.determinant();
  if (!(std::log10(condition) <= 0.5 * digits10<R>()) || !(det > 0)) {
    throw Error(ErrorKind::PrecisionExhausted,
                "moment matrix condition ~1e" + std::to_string(static_cast<int>(std::log10(condition))) + " at " +
                    std::to_string(digits10<R>()) + " digits");
  }
  using std::log;
  return {log(det), condition};
}

/// Orthonormal polynomials p_k = sum_j coeffs(k, j) l^j, k < N, from the
/// Cholesky factor of the moment matrix.
template <typename R>
struct OrthoBasis {
  Mat<R> coeffs;
  Vec<R> kappa;  // leading coefficients
  Vec<R> a;      // a_1..a_{N-1} (off-diagonal of the Jacobi matrix)
  Vec<R> b;      // b_0..b_{N-1}
  Mat<R> gram;   // int p_j p_k h, recomputed from the moments

  R eval(int k, const R& x) const {
    R s(0);
    for (int j = k; j >= 0; --j) s = s * x + coeffs(k, j);
    return s;
  }
  /// -2 sum log kappa_k = log D_N.
  R log_det() const {
    using std::log;
    R s(0);
    for (Eigen::Index k = 0; k < kappa.size(); ++k) s -= 2 * log(kappa(k));
    return s;
  }
};

template <typename R>
OrthoBasis<R> ortho_basis(const HankelSpec& spec, const PanelLayout& layout = {}) {
  const int n = spec.n;
  const Vec<R> m = moments<R>(spec, 2 * n, layout);
  const Mat<R> h = hankel_matrix(m, n);
  Eigen::LLT<Mat<R>> llt(h);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::PrecisionExhausted, "moment matrix not numerically positive definite");
  }
  const Mat<R> l = llt.matrixL();
  OrthoBasis<R> basis;
  basis.coeffs = l.template triangularView<Eigen::Lower>().solve(Mat<R>::Identity(n, n));
  basis.kappa = basis.coeffs.diagonal();
  basis.gram = basis.coeffs * h * basis.coeffs.transpose();
  if (n >= 1) {
    const Mat<R> j = basis.coeffs * hankel_matrix(m, n, 1).topLeftCorner(n, n) * basis.coeffs.transpose();
    basis.b = j.diagonal();
    basis.a = n > 1 ? Vec<R>(j.diagonal(-1)) : Vec<R>();
  }
  return basis;
}

}  // namespace hankel

/// Supported working precisions in decimal digits.
inline constexpr int kHankelDigits[] = {50, 100, 200};

/// log D_N for the spec at the smallest supported precision >= digits;
/// retried once at double the digits on PrecisionExhausted.
double log_hankel(const HankelSpec& spec, int digits = 50, const PanelLayout& layout = {});

/// E exp(gamma h_N(x)) = D_N(x; gamma) / D_N(0; 0) exp(-sqrt2 pi gamma N F(x)). N <= 12.
double exp_moment_exact(double x, double gamma, int n, const Potential& potential, int digits = 50);
/// log of the above, without the final exponentiation.
double log_exp_moment_exact(double x, double gamma, int n, const Potential& potential, int digits = 50);

struct DiffIdCheck {
  double lhs;  // centered difference of log D_N in x2
  double rhs;  // -e^{w(x2) - N V(x2)} (1 - e^{sqrt2 pi g2}) sum_{j<N} p_j(x2)^2
  double gap;
};

DiffIdCheck diffid_y_check(const HankelSpec& spec, double dy, int digits = 50);

/// sqrt2 pi g N F(x) + (g^2/2) log N + (3 g^2/4) log(1-x^2): single jump,
/// log D_N(x; g) / D_N(x; 0) up to O(1). Throws EdgeTooClose for |x| > 1 - m N^{-2/3}.
double predict_single_jump(double x, double gamma, int n, const EquilibriumMeasure& measure, double m = 2.0);

/// sqrt2 pi g2 N mu([x1,x2]) - g1 g2 max(0, log(|x1-x2| N)): two jumps relative
/// to the merged jump g1+g2 at x1, up to O(1).
double predict_merging_jumps(double x1, double x2, double gamma1, double gamma2, int n,
                             const EquilibriumMeasure& measure);

/// N int w dmu + sigma(w)^2/2 + sum_j (g_j/sqrt2) sqrt(1-x_j^2) (Uw)(x_j):
/// log D_N(...; w) / D_N(...; 0) up to o(1).
double predict_smooth_perturbation(double x1, double x2, double gamma1, double gamma2, const Eigen::VectorXd& w_cheb,
                                   int n, const EquilibriumMeasure& measure);

}  // namespace rmtlab
