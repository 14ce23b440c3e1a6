#pragma once

#include <Eigen/Core>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

namespace rmtlab::quad {

template <typename Scalar>
struct Rule {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
};

namespace detail {

template <typename Scalar>
Rule<Scalar> build_gauss_legendre(int n) {
  using std::abs;
  using std::cos;
  Rule<Scalar> r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const Scalar eps = Eigen::NumTraits<Scalar>::epsilon();
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Scalar x = Scalar(std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5)));
    Scalar dp(0);
    for (int it = 0; it < 100; ++it) {
      Scalar p0(1), p1 = x;
      for (int k = 2; k <= n; ++k) {
        Scalar p2 = (Scalar(2 * k - 1) * x * p1 - Scalar(k - 1) * p0) / Scalar(k);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = Scalar(1);
      dp = Scalar(n) * (x * p1 - p0) / (x * x - 1);
      Scalar dx = p1 / dp;
      x -= dx;
      if (abs(dx) <= 4 * eps * abs(x) + eps) {
        // one more pass for the derivative at the converged node
        p0 = Scalar(1);
        p1 = x;
        for (int k = 2; k <= n; ++k) {
          Scalar p2 = (Scalar(2 * k - 1) * x * p1 - Scalar(k - 1) * p0) / Scalar(k);
          p0 = p1;
          p1 = p2;
        }
        if (n == 1) p0 = Scalar(1);
        dp = Scalar(n) * (x * p1 - p0) / (x * x - 1);
        break;
      }
    }
    Scalar w = Scalar(2) / ((1 - x * x) * dp * dp);
    r.nodes(i) = -x;
    r.weights(i) = w;
    r.nodes(n - 1 - i) = x;
    r.weights(n - 1 - i) = w;
  }
  return r;
}

}  // namespace detail

/// Gauss-Legendre rule on [-1,1], cached per scalar type and order.
template <typename Scalar = double>
const Rule<Scalar>& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, Rule<Scalar>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::build_gauss_legendre<Scalar>(n)).first;
  return it->second;
}

/// Integrates f over [a,b] with an n-point Gauss-Legendre rule.
template <typename Scalar, typename F>
Scalar integrate(F&& f, const Scalar& a, const Scalar& b, int n) {
  const auto& r = gauss_legendre<Scalar>(n);
  const Scalar half = (b - a) / 2, mid = (a + b) / 2;
  Scalar s(0);
  for (int i = 0; i < n; ++i) s += r.weights(i) * f(mid + half * r.nodes(i));
  return s * half;
}

/// Composite Gauss-Legendre over `panels` equal subintervals of [a,b].
template <typename Scalar, typename F>
Scalar integrate_composite(F&& f, const Scalar& a, const Scalar& b, int panels, int n) {
  Scalar s(0);
  const Scalar h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) s += integrate<Scalar>(f, a + h * p, a + h * (p + 1), n);
  return s;
}

/// Integral of g(t) * sqrt(1-t^2) over [-1,1] by second-kind Gauss-Chebyshev
/// with n nodes; exact for polynomial g of degree <= 2n-1.
template <typename F>
double integrate_semicircle_weight(F&& g, int n) {
  double s = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double th = std::numbers::pi * i / (n + 1);
    const double st = std::sin(th);
    s += st * st * g(std::cos(th));
  }
  return s * std::numbers::pi / (n + 1);
}

/// Integral of g(t) / sqrt(1-t^2) over [-1,1] by first-kind Gauss-Chebyshev.
template <typename F>
double integrate_chebyshev_weight(F&& g, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += g(std::cos(std::numbers::pi * (i + 0.5) / n));
  return s * std::numbers::pi / n;
}

}  // namespace rmtlab::quad
