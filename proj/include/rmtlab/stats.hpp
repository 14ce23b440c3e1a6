#pragma once

#include <span>
#include <vector>

namespace rmtlab::stats {

double mean(std::span<const double> xs);
/// Unbiased sample variance.
double variance(std::span<const double> xs);
double standard_error(std::span<const double> xs);
double median(std::span<const double> xs);
double quantile(std::span<const double> xs, double q);

double normal_cdf(double x);

/// Asymptotic Kolmogorov survival function Q_KS(lambda).
double kolmogorov_survival(double lambda);

struct KsResult {
  double statistic;
  double p_value;
};

/// One-sample KS test against the standard normal.
KsResult ks_test_normal(std::span<const double> xs);
/// Two-sample KS statistic and approximate p-value.
KsResult ks_test_two_sample(std::span<const double> a, std::span<const double> b);

/// Gini coefficient of a nonnegative sample.
double gini(std::span<const double> xs);

/// Least-squares fit y = slope * x + intercept.
struct LineFit {
  double slope;
  double intercept;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace rmtlab::stats
