#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "rmtlab/eqmeasure.hpp"
#include "rmtlab/errors.hpp"

using namespace rmtlab;
using std::numbers::pi;

namespace {

// Brute-force PV oracle by singularity subtraction on first-kind Chebyshev nodes:
// (Uf)(x) = (1/pi) int (f(t)-f(x))/(x-t) dt/sqrt(1-t^2), since PV int dt/((x-t)sqrt(1-t^2)) = 0.
double hilbert_oracle(const std::function<double(double)>& f, double x, int n = 20000) {
  const double fx = f(x);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = std::cos(pi * (i + 0.5) / n);
    if (std::abs(t - x) < 1e-14) continue;
    s += (f(t) - fx) / (x - t);
  }
  return s / n;
}

double quartic_scale() { return std::sqrt((std::sqrt(13.0) - 1.0) / 3.0); }

}  // namespace

TEST_CASE("gue measure has constant psi = 2/pi") {
  auto m = solve_equilibrium(Potential::gue());
  for (double x : {-0.99, -0.5, 0.0, 0.3, 0.999}) CHECK(m.psi(x) == doctest::Approx(2.0 / pi).epsilon(1e-14));
  CHECK(m.density(0.5) == doctest::Approx(2.0 / pi * std::sqrt(0.75)).epsilon(1e-14));
  CHECK(m.density(1.5) == 0.0);
}

TEST_CASE("gue Lagrange constant against log-singular quadrature") {
  auto m = solve_equilibrium(Potential::gue());
  boost::math::quadrature::tanh_sinh<double> ts;
  auto g = [](double y) { return std::log(std::abs(y)) * (2.0 / pi) * std::sqrt(1.0 - y * y); };
  const double oracle = -2.0 * (ts.integrate(g, -1.0, 0.0) + ts.integrate(g, 0.0, 1.0));
  CHECK(oracle == doctest::Approx(1.0 + 2.0 * std::log(2.0)).epsilon(1e-10));
  CHECK(m.lagrange_ell() == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("log potential matches quadrature inside and outside the support") {
  auto m = solve_equilibrium(Potential::quartic());
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double x : {-2.0, -1.5, -0.7, 0.0, 0.4, 1.2, 3.0}) {
    auto g = [&](double t) { return std::log(std::abs(x - t)) * m.density(t); };
    double oracle;
    if (std::abs(x) < 1.0) {
      oracle = ts.integrate(g, -1.0, x) + ts.integrate(g, x, 1.0);
    } else {
      oracle = ts.integrate(g, -1.0, 1.0);
    }
    CHECK(m.log_potential(x) == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("Euler-Lagrange equality holds on the support for the quartic") {
  auto v = Potential::quartic();
  auto m = solve_equilibrium(v);
  for (double x : {-0.9, -0.3, 0.2, 0.8}) {
    CHECK(2.0 * m.log_potential(x) - v(x) == doctest::Approx(-m.lagrange_ell()).epsilon(1e-11));
  }
  for (double x : {-1.5, 1.5, 2.5}) CHECK(2.0 * m.log_potential(x) - v(x) < -m.lagrange_ell());
}

TEST_CASE("cdf endpoints, symmetry and monotonicity") {
  for (auto v : {Potential::gue(), Potential::quartic()}) {
    auto m = solve_equilibrium(v);
    CHECK(std::abs(m.cdf(-1.0)) < 1e-10);
    CHECK(std::abs(m.cdf(1.0) - 1.0) < 1e-10);
    CHECK(std::abs(m.cdf_theta(pi)) < 1e-14);
    CHECK(std::abs(m.cdf_theta(0.0) - 1.0) < 1e-14);
    CHECK(m.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    double prev = 0.0;
    for (int i = 1; i < 2000; ++i) {
      const double f = m.cdf(-1.0 + i / 1000.0);
      CHECK(f > prev);
      prev = f;
    }
    // density integrates to cdf increments
    boost::math::quadrature::tanh_sinh<double> ts;
    CHECK(m.cdf(0.37) - m.cdf(-0.61) ==
          doctest::Approx(ts.integrate([&](double t) { return m.density(t); }, -0.61, 0.37)).epsilon(1e-12));
  }
}

TEST_CASE("quantile examples and round trip") {
  auto m = solve_equilibrium(Potential::gue());
  CHECK(std::abs(quantiles(m, 2).kappa[0]) < 1e-14);
  CHECK(quantiles(m, 1).kappa[0] == 1.0);
  CHECK_THROWS_AS(quantiles(m, 0), Error);
  for (auto v : {Potential::gue(), Potential::quartic()}) {
    auto mm = solve_equilibrium(v);
    auto q = quantiles(mm, 777);
    CHECK(q.kappa.back() == 1.0);
    for (int j = 1; j < 777; ++j) {
      CHECK(std::abs(mm.cdf(q.kappa[j - 1]) - static_cast<double>(j) / 777) < 1e-10);
      CHECK(q.kappa[j] > q.kappa[j - 1]);
    }
  }
}

TEST_CASE("left-edge quantile scaling approaches c_minus") {
  auto m = solve_equilibrium(Potential::gue());
  CHECK(m.edge_c_minus() == doctest::Approx(std::pow(3.0 * pi / (4.0 * std::sqrt(2.0)), 2.0 / 3.0)).epsilon(1e-13));
  CHECK(m.edge_c_minus() == doctest::Approx(1.4054).epsilon(1e-4));
  CHECK(m.edge_c_plus() == doctest::Approx(m.edge_c_minus()).epsilon(1e-13));
  const double n = 1e6;
  const double k1 = m.quantile(1.0 / n);
  CHECK((k1 + 1.0) * std::pow(n, 2.0 / 3.0) == doctest::Approx(m.edge_c_minus()).epsilon(0.01));
  auto mq = solve_equilibrium(Potential::quartic());
  CHECK(mq.edge_c_minus() > 0.0);
  CHECK(std::isfinite(mq.edge_c_plus()));
  CHECK((mq.quantile(1.0 / n) + 1.0) * std::pow(n, 2.0 / 3.0) == doctest::Approx(mq.edge_c_minus()).epsilon(0.01));
}

TEST_CASE("quartic potential reconstruction and normalization") {
  auto v = Potential::quartic();
  const double a = quartic_scale();
  CHECK(v.deriv_cheb()(1) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(std::abs(v.deriv_cheb()(1) - 4.0) < 1e-8);
  double err = 0.0, verr = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double x = -1.0 + i / 1000.0;
    const double y = a * x;
    err = std::max(err, std::abs(v.derivative(x) - a * (4 * y * y * y + 2 * y)));
    verr = std::max(verr, std::abs(v(x) - (y * y * y * y + y * y)));
  }
  CHECK(err < 1e-10);
  CHECK(verr < 1e-10);
  auto m = solve_equilibrium(v);
  CHECK(m.psi(0.9) > m.psi(0.0));
}

TEST_CASE("normalization and one-cut validation") {
  Eigen::VectorXd c(2);
  c << 0.0, 3.0;
  CHECK_THROWS_AS(solve_equilibrium(Potential::from_derivative_cheb("bad", c)), Error);
  try {
    solve_equilibrium(Potential::from_derivative_cheb("bad", c));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BadNormalization);
  }
  // psi = (4 U_0 - 8 U_2 + 6 U_4)/(2 pi) is negative near x = +-0.75 but V is confining
  Eigen::VectorXd d(6);
  d << 0.0, 4.0, 0.0, -8.0, 0.0, 6.0;
  auto w = Potential::from_derivative_cheb("wells", d);
  bool negative = false;
  for (int i = 0; i <= 1000; ++i) {
    const double x = -1.0 + i / 500.0;
    if (4.0 - 8.0 * cheb::u_poly(2, x) + 6.0 * cheb::u_poly(4, x) <= 0.0) negative = true;
  }
  REQUIRE(negative);
  try {
    solve_equilibrium(w);
    FAIL("expected NotOneCut");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotOneCut);
  }
  CHECK_THROWS_AS(Potential::by_name("nope"), Error);
}

TEST_CASE("finite Hilbert transform examples") {
  CHECK(std::abs(finite_hilbert([](double) { return 1.0; }, 0.3)) < 1e-12);
  CHECK(finite_hilbert([](double t) { return 2 * t * t - 1; }, 0.5) == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(finite_hilbert([](double t) { return t; }, 0.0) == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK_THROWS_AS(finite_hilbert([](double t) { return t; }, 1.0), Error);
  CHECK_THROWS_AS(finite_hilbert([](double t) { return t; }, -1.2), Error);
}

TEST_CASE("U T_n = -U_{n-1} against the brute-force oracle") {
  for (int n = 1; n <= 10; ++n) {
    auto f = [n](double t) { return cheb::t_poly(n, t); };
    for (double x : {-0.95, -0.41, 0.0, 0.27, 0.8, 0.999}) {
      const double u = finite_hilbert(f, x);
      CHECK(u == doctest::Approx(-cheb::u_poly(n - 1, x)).epsilon(1e-9).scale(1.0));
      CHECK(u == doctest::Approx(hilbert_oracle(f, x)).epsilon(1e-7).scale(1.0));
    }
  }
  auto e = [](double t) { return std::exp(t) * std::sin(3 * t); };
  for (double x : {-0.6, 0.1, 0.93}) CHECK(finite_hilbert(e, x) == doctest::Approx(hilbert_oracle(e, x)).epsilon(1e-7));
}

TEST_CASE("inversion consistency: 2 PV int dmu/(x-t) reproduces V'") {
  for (auto v : {Potential::gue(), Potential::quartic()}) {
    auto m = solve_equilibrium(v);
    auto g = [&](double t) { return m.psi(t) * (1.0 - t * t); };
    for (int i = 1; i < 20; ++i) {
      const double x = -1.0 + i / 10.0;
      CHECK(2.0 * pi * finite_hilbert(g, x) == doctest::Approx(v.derivative(x)).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("variance examples") {
  CHECK(sigma_variance([](double t) { return t; }).value == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(std::abs(sigma_variance([](double) { return 1.0; }).value) < 1e-14);
  auto t2 = sigma_variance([](double t) { return 2 * t * t - 1; });
  CHECK(t2.value == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(t2.hilbert == doctest::Approx(0.5).epsilon(1e-9));
  auto fh = fourier_chebyshev([](double t) { return 3.0 + t; }, 8);
  CHECK(fh(0) == doctest::Approx(6.0));
  CHECK(fh(1) == doctest::Approx(1.0));
}

TEST_CASE("two variance formulas agree on random polynomials up to degree 12") {
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  for (int deg = 1; deg <= 12; ++deg) {
    Eigen::VectorXd c(deg + 1);
    for (int k = 0; k <= deg; ++k) c(k) = nd(rng);
    auto f = [&](double t) { return cheb::eval_t(c, t); };
    VarianceEstimate est{};
    CHECK_NOTHROW(est = sigma_variance(f));
    CHECK(est.discrepancy < 1e-8);
    double direct = 0.0;
    for (int k = 1; k <= deg; ++k) direct += 0.25 * k * c(k) * c(k);
    CHECK(est.value == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("variance is nonnegative and bilinear form is symmetric") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> deg(0, 8);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = deg(rng);
    Eigen::VectorXd c(d + 1);
    for (int k = 0; k <= d; ++k) c(k) = nd(rng);
    CHECK(sigma_variance([&](double t) { return cheb::eval_t(c, t); }).value >= 0.0);
  }
  auto f = [](double t) { return t * t * t - t; };
  auto g = [](double t) { return std::exp(t); };
  CHECK(sigma_bilinear(f, g, 1e-7).value == doctest::Approx(sigma_bilinear(g, f, 1e-7).value).epsilon(1e-12));
}
