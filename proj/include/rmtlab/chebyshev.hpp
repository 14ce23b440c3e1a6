#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <numbers>

namespace rmtlab::cheb {

/// Clenshaw evaluation of sum_k c[k] T_k(x). Valid for any real x (the
/// series is a polynomial), not only on [-1,1].
template <typename Scalar, typename Derived>
Scalar eval_t(const Eigen::DenseBase<Derived>& c, const Scalar& x) {
  const Eigen::Index n = c.size();
  if (n == 0) return Scalar(0);
  Scalar b1(0), b2(0);
  const Scalar two_x = 2 * x;
  for (Eigen::Index k = n - 1; k >= 1; --k) {
    Scalar b0 = two_x * b1 - b2 + Scalar(c(k));
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + Scalar(c(0));
}

/// Clenshaw evaluation of sum_k c[k] U_k(x).
template <typename Scalar, typename Derived>
Scalar eval_u(const Eigen::DenseBase<Derived>& c, const Scalar& x) {
  const Eigen::Index n = c.size();
  if (n == 0) return Scalar(0);
  Scalar b1(0), b2(0);
  const Scalar two_x = 2 * x;
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    Scalar b0 = two_x * b1 - b2 + Scalar(c(k));
    b2 = b1;
    b1 = b0;
  }
  return b1;
}

inline double t_poly(int k, double x) {
  if (std::abs(x) <= 1.0) return std::cos(k * std::acos(x));
  double tkm1 = 1.0, tk = x;
  if (k == 0) return 1.0;
  for (int j = 1; j < k; ++j) {
    double next = 2 * x * tk - tkm1;
    tkm1 = tk;
    tk = next;
  }
  return tk;
}

inline double u_poly(int k, double x) {
  double ukm1 = 1.0, uk = 2 * x;
  if (k == 0) return 1.0;
  for (int j = 1; j < k; ++j) {
    double next = 2 * x * uk - ukm1;
    ukm1 = uk;
    uk = next;
  }
  return uk;
}

/// Chebyshev-T interpolation coefficients of f on [-1,1] from n first-kind
/// (Gauss-Chebyshev) nodes. Returns c[0..n-1].
template <typename F>
Eigen::VectorXd interpolate(F&& f, int n) {
  Eigen::VectorXd vals(n);
  for (int j = 0; j < n; ++j) {
    double th = std::numbers::pi * (j + 0.5) / n;
    vals(j) = f(std::cos(th));
  }
  Eigen::VectorXd c(n);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += vals(j) * std::cos(k * std::numbers::pi * (j + 0.5) / n);
    c(k) = (k == 0 ? 1.0 : 2.0) * s / n;
  }
  return c;
}

/// Coefficients of the derivative of sum c_k T_k, again in the T basis.
inline Eigen::VectorXd derivative(const Eigen::VectorXd& c) {
  const Eigen::Index n = c.size();
  if (n <= 1) return Eigen::VectorXd::Zero(1);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n - 1);
  for (Eigen::Index k = n - 1; k >= 1; --k) {
    double next = (k + 1 < n - 1) ? d(k + 1) : 0.0;
    if (k - 1 >= 0) d(k - 1) = next + 2.0 * k * c(k);
  }
  d(0) *= 0.5;
  return d;
}

/// Antiderivative coefficients (T basis) with value 0 at x = 0.
inline Eigen::VectorXd antiderivative(const Eigen::VectorXd& c) {
  const Eigen::Index n = c.size();
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n + 1);
  for (Eigen::Index k = 0; k < n; ++k) {
    // int T_0 = T_1, int T_1 = T_2/4 (+const), int T_k = T_{k+1}/(2(k+1)) - T_{k-1}/(2(k-1))
    if (k == 0) {
      a(1) += c(0);
    } else if (k == 1) {
      a(2) += c(1) / 4.0;
    } else {
      a(k + 1) += c(k) / (2.0 * (k + 1));
      a(k - 1) -= c(k) / (2.0 * (k - 1));
    }
  }
  a(0) -= eval_t(a, 0.0);
  return a;
}

/// Drops trailing coefficients with magnitude below tol (keeps at least one).
inline Eigen::VectorXd trim(const Eigen::VectorXd& c, double tol) {
  Eigen::Index n = c.size();
  while (n > 1 && std::abs(c(n - 1)) < tol) --n;
  return c.head(n);
}

}  // namespace rmtlab::cheb
