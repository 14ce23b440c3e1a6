#pragma once

#include <Eigen/Core>

#include <functional>

#include "rmtlab/eqmeasure.hpp"
#include "rmtlab/sampler.hpp"

namespace rmtlab {

/// h_N(x) = sqrt(2) pi (#{lambda_j <= x} - N F(x)) for one spectrum.
class CountingField {
 public:
  /// Throws ConfigError if the spectrum records a different potential.
  CountingField(const Spectrum& spectrum, const EquilibriumMeasure& measure);

  int n() const { return static_cast<int>(lambda_.size()); }
  const Eigen::VectorXd& eigenvalues() const { return lambda_; }
  const EquilibriumMeasure& measure() const { return measure_; }

  /// #{j : lambda_j <= x}.
  int count(double x) const;

 private:
  Eigen::VectorXd lambda_;
  EquilibriumMeasure measure_;
};

inline constexpr double kJump = 4.44288293815836624702;  // sqrt(2) pi

struct ExtremaReport {
  double max_value;   // max_j h(lambda_j)
  double min_value;   // min_j h(lambda_j^-)
  double argmax;
  double argmin;
  double max_over_R;  // max(max_value, 0)
  double min_over_R;  // min(min_value, 0)
};

double h_at(const CountingField& field, double x);
ExtremaReport extrema(const CountingField& field);
/// max_j pi psi(k_j) sqrt(1-k_j^2) |lambda_j - k_j| N / log N.
double rigidity_stat(const CountingField& field);
/// Kolmogorov distance between the empirical measure and mu_V.
double ks_distance(const CountingField& field);

/// Poisson smoothing (phi_eps * h_N)(x) = sum_j w(lambda_j) - N int w dmu with
/// w(l) = sqrt(2)(pi/2 + atan((x-l)/eps)). Throws DomainError for eps <= 0.
double harmonic_extension(const CountingField& field, double x, double eps);
/// The deterministic part N int w dmu of the above.
double harmonic_extension_mean(const EquilibriumMeasure& measure, int n, double x, double eps);
/// Gauss-Chebyshev node count used for the mean term.
int harmonic_extension_nodes(double eps);

/// sum_j f(lambda_j) - N int f dmu.
double linear_statistic(const CountingField& field, const std::function<double(double)>& f);

}  // namespace rmtlab
