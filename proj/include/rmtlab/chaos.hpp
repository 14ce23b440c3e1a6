#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "rmtlab/counting.hpp"
#include "rmtlab/eqmeasure.hpp"
#include "rmtlab/sampler.hpp"

namespace rmtlab {

/// X_K(x) = sum_{k<=K} sqrt(2/k) xi_k U_{k-1}(x) sqrt(1-x^2) = sum sqrt(2/k) xi_k sin(k theta).
struct GaussianField {
  int k = 0;
  Eigen::VectorXd xi;

  double eval(double x) const;
  /// sum_{k<=K} (2/k) U_{k-1}(x)^2 (1-x^2).
  double variance(double x) const;
};

/// K standard normals from the seeded generator; fields with the same seed
/// share their leading coefficients.
GaussianField sample_field(int k, std::uint64_t seed);

/// log|(1 - xy + sqrt(1-x^2) sqrt(1-y^2)) / (x - y)|. Throws DiagonalError at x = y.
double sigma_kernel(double x, double y);

/// Quadrature grid: points with cell weights.
struct Grid {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;

  /// `cells` equal cells on [lo, hi], one point per cell midpoint.
  static Grid midpoint(double lo, double hi, int cells);
  double length() const { return weights.sum(); }
  Eigen::Index size() const { return points.size(); }
};

enum class Normalization { MonteCarlo, HankelExact, Surrogate };

std::string to_string(Normalization kind);
Normalization normalization_from_string(const std::string& name);

struct ChaosMeasure {
  Grid grid;
  Eigen::VectorXd density;
  double gamma = 0.0;
  Normalization normalization = Normalization::MonteCarlo;

  double total_mass() const { return grid.weights.dot(density); }
  /// Mass of the cells whose midpoints lie in [a, b].
  double mass(double a, double b) const;
};

/// gamma * h_N on the grid for one spectrum.
Eigen::VectorXd log_tilt(const Spectrum& spectrum, const EquilibriumMeasure& measure, double gamma, const Grid& grid);

/// log E^ exp(gamma h_N(x)) per grid point.
///   MonteCarlo: mean over the replicas (M >= 50, else InsufficientReplicas);
///   HankelExact: determinant ratio (N <= 12, else NormalizationUnavailable);
///   Surrogate: N^{g^2/2} (1-x^2)^{3g^2/4} c with c fitted so the mean mass over
///   the replicas equals the grid length.
Eigen::VectorXd log_normalizer(std::span<const Spectrum> replicas, const EquilibriumMeasure& measure, double gamma,
                               const Grid& grid, Normalization kind);

/// exp(gamma h_N(x) - log_norm(x)) for one spectrum.
ChaosMeasure normalized_density(const Spectrum& spectrum, const EquilibriumMeasure& measure, double gamma,
                                const Grid& grid, const Eigen::VectorXd& log_norm, Normalization kind);

/// Density of the designated replica under the requested normalization.
/// Throws DomainError for |gamma| >= 2.
ChaosMeasure chaos_density(std::span<const Spectrum> replicas, const EquilibriumMeasure& measure, double gamma,
                           const Grid& grid, Normalization kind, int designated = 0);

struct ThickPointReport {
  double gamma;
  int sign;                 // +1 for {h >= g log N}, -1 for {-h >= g log N}
  double lebesgue_measure;  // in [0, 2]
  std::optional<double> exponent;  // log(measure) / log N; empty set gives no value
};

/// Exact Lebesgue measure of {x in [-1,1] : sign h_N(x) >= gamma log N}.
ThickPointReport thick_points(const CountingField& field, double gamma, int sign = +1);

/// log int_{-1}^{1} exp(gamma h_N(x)) dx, integrated exactly per inter-eigenvalue interval.
double log_partition(const CountingField& field, double gamma);
/// log_partition / log N. Throws DomainError for gamma <= 0.
double free_energy(const CountingField& field, double gamma);

/// Mesoscopic chaos: h_N replaced by its harmonic extension at eps = N^{alpha-1};
/// Monte Carlo normalization over the replicas.
ChaosMeasure meso_chaos_density(std::span<const Spectrum> replicas, const EquilibriumMeasure& measure, double gamma,
                                double alpha, const Grid& grid, int designated = 0);
/// gamma times the harmonic extension on the grid, for every replica (rows).
Eigen::MatrixXd meso_log_tilts(std::span<const Spectrum> replicas, const EquilibriumMeasure& measure, double gamma,
                               double alpha, const Grid& grid);

/// exp(gamma X_K - gamma^2/2 Var X_K) on the grid. Throws DomainError for |gamma| >= sqrt 2.
ChaosMeasure reference_gmc(int k, double gamma, const Grid& grid, std::uint64_t seed);

}  // namespace rmtlab
