#include <doctest.h>

#include <array>
#include <cmath>

#include "rmtlab/errors.hpp"
#include "rmtlab/painleve.hpp"

using namespace rmtlab;

namespace {

// classical RK4 on the differentiated form, fixed step in r
std::array<double, 3> rk4_reference(double g1, double g2, double p, double r_min, double r_end, int steps) {
  const double b2 = (g1 + g2) * (g1 + g2) / 8.0;
  auto f = [&](double r, const std::array<double, 3>& y) {
    const double u = y[0] - r * y[1] - 2 * y[1] * y[1];
    return std::array<double, 3>{y[1], y[2], (-8 * (b2 - y[1] * y[1]) * y[1] + u * (r + 4 * y[1]) - r * y[2]) / (r * r)};
  };
  std::array<double, 3> y = {(g1 + g2) * (g1 + g2) / 4 + p * r_min, p, 0.0};
  // geometric steps resolve the 1/r behaviour near r_min
  const double q = std::pow(r_end / r_min, 1.0 / steps);
  double r = r_min;
  for (int i = 0; i < steps; ++i) {
    const double h = r * (q - 1);
    auto add = [](const std::array<double, 3>& a, const std::array<double, 3>& k, double c) {
      return std::array<double, 3>{a[0] + c * k[0], a[1] + c * k[1], a[2] + c * k[2]};
    };
    const auto k1 = f(r, y), k2 = f(r + h / 2, add(y, k1, h / 2)), k3 = f(r + h / 2, add(y, k2, h / 2)),
               k4 = f(r + h, add(y, k3, h));
    for (int j = 0; j < 3; ++j) y[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    r *= q;
  }
  return y;
}

}  // namespace

TEST_CASE("target algebra") {
  const auto t = sigma_pv_targets(0.7, -0.7);
  CHECK(t.small_r_value == 0.0);
  CHECK(t.intercept == doctest::Approx(0.49).epsilon(1e-15));
  const auto u = sigma_pv_targets(0.8, 0.2);
  CHECK(u.slope == doctest::Approx(-0.6 / (2 * std::sqrt(2.0))).epsilon(1e-15));
  CHECK(u.slope == doctest::Approx(-0.2121).epsilon(1e-3));
  CHECK(u.intercept == doctest::Approx(0.09).epsilon(1e-14));
  CHECK(u.small_r_value == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("lines through the small-r value solve the real form exactly") {
  // tau = (g1+g2)^2/4 + p r has tau'' = 0 and a vanishing right-hand side
  for (double p : {-1.0, -0.2, 0.0, 0.35, 2.0}) {
    for (double r : {1e-3, 0.5, 7.0, 40.0}) {
      const double tau = 0.25 + p * r;
      CHECK(std::abs(sigma_pv_rhs(0.8, 0.2, r, tau, p)) < 1e-12 * (1 + tau * tau + p * p * p * p));
    }
  }
  // in particular the constant candidate tau = (g1+g2)^2/4
  SigmaPVSolution c;
  c.gamma1 = 0.8;
  c.gamma2 = 0.2;
  c.r_grid = Eigen::VectorXd::LinSpaced(101, 0.001, 10.0);
  c.sigma = Eigen::VectorXd::Constant(101, 0.25);
  c.sigma_prime = Eigen::VectorXd::Zero(101);
  c.sigma_second = Eigen::VectorXd::Zero(101);
  CHECK(residual(c) < 1e-12);
  // a non-solution is detected
  c.sigma = Eigen::VectorXd::Constant(101, 0.3);
  CHECK(residual(c) > 1e-3);
}

TEST_CASE("single trajectory against an independent RK4 integration") {
  SigmaPVOptions o;
  o.r_max = 10.0;
  o.grid_points = 1001;
  const auto t = shoot_sigma_pv(0.8, 0.2, -0.3, o);
  REQUIRE(t.admissible);
  const auto ref = rk4_reference(0.8, 0.2, -0.3, o.r_min, 10.0, 200000);
  const Eigen::Index last = t.solution.r_grid.size() - 1;
  CHECK(t.solution.r_grid(last) == 10.0);
  CHECK(t.solution.sigma(last) == doctest::Approx(ref[0]).epsilon(1e-7));
  CHECK(t.solution.sigma_prime(last) == doctest::Approx(ref[1]).epsilon(1e-7));
  // the quadratic relation is a first integral of the differentiated form
  const auto& s = t.solution;
  for (Eigen::Index i = 0; i <= last; ++i) {
    const double r = s.r_grid(i);
    const double e = r * r * s.sigma_second(i) * s.sigma_second(i) - sigma_pv_rhs(0.8, 0.2, r, s.sigma(i), s.sigma_prime(i));
    CHECK(std::abs(e) < 1e-9);
  }
}

TEST_CASE("shooting solution for (0.8, 0.2)") {
  const auto s = integrate_sigma_pv(0.8, 0.2);
  const auto target = sigma_pv_targets(0.8, 0.2);
  CHECK(s.r_grid(0) == 1e-3);
  CHECK(s.r_grid(s.r_grid.size() - 1) == 40.0);
  CHECK(std::abs(s.sigma(0) - target.small_r_value) <= std::abs(s.shooting_param) * 1e-3 + 1e-15);
  CHECK((s.sigma.array().isFinite()).all());
  const auto fit = fit_large_r(s);
  CHECK(std::abs(fit.slope / target.slope - 1) < 0.02);
  CHECK(std::abs(fit.intercept / target.intercept - 1) < 0.05);
  CHECK(residual(s) < 1e-6);
  // the shooting parameter hardly moves with r_min
  SigmaPVOptions o;
  o.r_min = 1e-2;
  CHECK(std::abs(integrate_sigma_pv(0.8, 0.2, o).shooting_param - s.shooting_param) < 2e-3);
}

TEST_CASE("swapping the jumps flips the slope and fixes the small-r value") {
  const auto a = integrate_sigma_pv(0.8, 0.2), b = integrate_sigma_pv(0.2, 0.8);
  const auto fa = fit_large_r(a), fb = fit_large_r(b);
  CHECK(fa.slope < 0);
  CHECK(fb.slope > 0);
  CHECK(std::abs(fa.slope + fb.slope) < 0.02 * std::abs(fa.slope));
  CHECK(std::abs(a.sigma(0) - b.sigma(0)) < 1e-3);
}

TEST_CASE("residual floor falls under grid refinement") {
  SigmaPVOptions coarse, fine;
  coarse.grid_points = 1001;
  fine.grid_points = 2001;
  const double rc = residual(integrate_sigma_pv(0.5, -0.3, coarse));
  const double rf = residual(integrate_sigma_pv(0.5, -0.3, fine));
  CHECK(rf <= 0.5 * rc);
}

TEST_CASE("sigma-PV error paths") {
  CHECK_THROWS_AS(integrate_sigma_pv(0.4, 0.4), Error);
  CHECK_THROWS_AS(integrate_sigma_pv(0.8, 0.2, 1.5, 40.0), Error);
  CHECK_THROWS_AS(integrate_sigma_pv(0.8, 0.2, 1e-3, 0.9), Error);
  try {
    shoot_sigma_pv(0.8, 0.2, -1.0 / (2 * std::sqrt(2.0)));
    FAIL("expected BranchAmbiguity");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BranchAmbiguity);
  }
  // a trajectory that runs away is flagged inadmissible and truncated
  const auto t = shoot_sigma_pv(0.8, 0.2, -1.0);
  CHECK_FALSE(t.admissible);
  CHECK(t.exit_r < 40.0);
  CHECK(t.solution.r_grid.size() < 4001);
}
