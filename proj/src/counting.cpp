#include "rmtlab/counting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rmtlab/errors.hpp"

namespace rmtlab {

CountingField::CountingField(const Spectrum& spectrum, const EquilibriumMeasure& measure)
    : lambda_(spectrum.values), measure_(measure) {
  const auto& p = spectrum.provenance.potential;
  if (!p.empty() && p != measure.potential_name()) {
    throw Error(ErrorKind::ConfigError,
                "spectrum potential '" + p + "' differs from measure potential '" + measure.potential_name() + "'");
  }
}

int CountingField::count(double x) const {
  const double* b = lambda_.data();
  return static_cast<int>(std::upper_bound(b, b + lambda_.size(), x) - b);
}

double h_at(const CountingField& field, double x) {
  return kJump * (field.count(x) - field.n() * field.measure().cdf(x));
}

ExtremaReport extrema(const CountingField& field) {
  const int n = field.n();
  const auto& l = field.eigenvalues();
  ExtremaReport r{};
  r.max_value = -std::numeric_limits<double>::infinity();
  r.min_value = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    const double h = h_at(field, l(j));
    if (h > r.max_value) {
      r.max_value = h;
      r.argmax = l(j);
    }
    // left limit: the count just below lambda_j excludes every copy of lambda_j
    const double left = kJump * (field.count(std::nextafter(l(j), -INFINITY)) - n * field.measure().cdf(l(j)));
    if (left < r.min_value) {
      r.min_value = left;
      r.argmin = l(j);
    }
  }
  r.max_over_R = std::max(r.max_value, 0.0);
  r.min_over_R = std::min(r.min_value, 0.0);
  return r;
}

double rigidity_stat(const CountingField& field) {
  const int n = field.n();
  const auto q = quantiles(field.measure(), n);
  const auto& l = field.eigenvalues();
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    const double k = q.kappa[j];
    const double w = std::numbers::pi * field.measure().psi(k) * std::sqrt(std::max(0.0, 1.0 - k * k));
    worst = std::max(worst, w * std::abs(l(j) - k));
  }
  return worst * n / std::log(static_cast<double>(n));
}

double ks_distance(const CountingField& field) {
  const auto e = extrema(field);
  return std::max(std::abs(e.max_over_R), std::abs(e.min_over_R)) / (kJump * field.n());
}

int harmonic_extension_nodes(double eps) {
  return std::max(256, static_cast<int>(std::ceil(40.0 / eps)));
}

double harmonic_extension_mean(const EquilibriumMeasure& measure, int n, double x, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::DomainError, "harmonic extension requires eps > 0");
  const double c = std::sqrt(2.0);
  const double integral = measure.integrate(
      [&](double t) { return c * (0.5 * std::numbers::pi + std::atan((x - t) / eps)); },
      harmonic_extension_nodes(eps));
  return n * integral;
}

double harmonic_extension(const CountingField& field, double x, double eps) {
  const double mean = harmonic_extension_mean(field.measure(), field.n(), x, eps);
  const double c = std::sqrt(2.0);
  double s = 0.0;
  const auto& l = field.eigenvalues();
  for (Eigen::Index j = 0; j < l.size(); ++j) s += c * (0.5 * std::numbers::pi + std::atan((x - l(j)) / eps));
  return s - mean;
}

double linear_statistic(const CountingField& field, const std::function<double(double)>& f) {
  const auto& l = field.eigenvalues();
  double s = 0.0;
  for (Eigen::Index j = 0; j < l.size(); ++j) s += f(l(j));
  return s - field.n() * field.measure().integrate(f, 512);
}

}  // namespace rmtlab
