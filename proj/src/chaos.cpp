#include "rmtlab/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rmtlab/errors.hpp"
#include "rmtlab/hankel.hpp"
#include "rmtlab/quadrature.hpp"
#include "rmtlab/rng.hpp"

namespace rmtlab {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd field_u_coeffs(const GaussianField& f) {
  Eigen::VectorXd c(f.k);
  for (int k = 1; k <= f.k; ++k) c(k - 1) = std::sqrt(2.0 / k) * f.xi(k - 1);
  return c;
}

double log_mean_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().mean());
}

void check_gamma(double gamma) {
  if (!(std::abs(gamma) < 2.0)) throw Error(ErrorKind::DomainError, "chaos density requires |gamma| < 2");
}

}  // namespace

double GaussianField::eval(double x) const {
  if (std::abs(x) >= 1.0) return 0.0;
  return cheb::eval_u(field_u_coeffs(*this), x) * std::sqrt((1.0 - x) * (1.0 + x));
}

double GaussianField::variance(double x) const {
  if (std::abs(x) >= 1.0) return 0.0;
  // U_{j-1}(x) by the three-term recurrence
  double u_prev = 0.0, u = 1.0, s = 0.0;
  for (int j = 1; j <= k; ++j) {
    s += 2.0 / j * u * u;
    const double next = 2.0 * x * u - u_prev;
    u_prev = u;
    u = next;
  }
  return s * (1.0 - x) * (1.0 + x);
}

GaussianField sample_field(int k, std::uint64_t seed) {
  if (k < 1) throw Error(ErrorKind::DomainError, "field truncation K must be >= 1");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  GaussianField f;
  f.k = k;
  f.xi.resize(k);
  for (int j = 0; j < k; ++j) f.xi(j) = normal(rng);
  return f;
}

double sigma_kernel(double x, double y) {
  if (!(std::abs(x) < 1.0) || !(std::abs(y) < 1.0)) throw Error(ErrorKind::DomainError, "sigma_kernel needs x, y in (-1,1)");
  if (x == y) throw Error(ErrorKind::DiagonalError, "sigma_kernel is singular on the diagonal");
  const double num = 1.0 - x * y + std::sqrt((1.0 - x) * (1.0 + x)) * std::sqrt((1.0 - y) * (1.0 + y));
  return std::log(std::abs(num / (x - y)));
}

Grid Grid::midpoint(double lo, double hi, int cells) {
  if (cells < 1 || !(hi > lo)) throw Error(ErrorKind::ConfigError, "grid needs cells >= 1 and hi > lo");
  Grid g;
  g.points.resize(cells);
  const double h = (hi - lo) / cells;
  for (int i = 0; i < cells; ++i) g.points(i) = lo + (i + 0.5) * h;
  g.weights = Eigen::VectorXd::Constant(cells, h);
  return g;
}

std::string to_string(Normalization kind) {
  switch (kind) {
    case Normalization::MonteCarlo: return "monte-carlo";
    case Normalization::HankelExact: return "hankel-exact";
    case Normalization::Surrogate: return "surrogate";
  }
  return "unknown";
}

Normalization normalization_from_string(const std::string& name) {
  if (name == "monte-carlo") return Normalization::MonteCarlo;
  if (name == "hankel-exact") return Normalization::HankelExact;
  if (name == "surrogate") return Normalization::Surrogate;
  throw Error(ErrorKind::ConfigError, "unknown normalization '" + name + "'");
}

double ChaosMeasure::mass(double a, double b) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (grid.points(i) >= a && grid.points(i) <= b) s += grid.weights(i) * density(i);
  }
  return s;
}

Eigen::VectorXd log_tilt(const Spectrum& spectrum, const EquilibriumMeasure& measure, double gamma, const Grid& grid) {
  CountingField field(spectrum, measure);
  Eigen::VectorXd t(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) t(i) = gamma * h_at(field, grid.points(i));
  return t;
}

Eigen::VectorXd log_normalizer(std::span<const Spectrum> replicas, const EquilibriumMeasure& measure, double gamma,
                               const Grid& grid, Normalization kind) {
  check_gamma(gamma);
  if (replicas.empty()) throw Error(ErrorKind::InsufficientReplicas, "no replicas supplied");
  const int n = replicas[0].n();
  const Eigen::Index g = grid.size();
  if (gamma == 0.0) return Eigen::VectorXd::Zero(g);
  switch (kind) {
    case Normalization::MonteCarlo: {
      if (replicas.size() < 50) {
        throw Error(ErrorKind::InsufficientReplicas, "monte-carlo normalization needs M >= 50, got " +
                                                         std::to_string(replicas.size()));
      }
      Eigen::MatrixXd t(static_cast<Eigen::Index>(replicas.size()), g);
      for (std::size_t r = 0; r < replicas.size(); ++r) t.row(static_cast<Eigen::Index>(r)) = log_tilt(replicas[r], measure, gamma, grid).transpose();
      Eigen::VectorXd out(g);
      for (Eigen::Index i = 0; i < g; ++i) out(i) = log_mean_exp(t.col(i));
      return out;
    }
    case Normalization::HankelExact: {
      if (n > 12) throw Error(ErrorKind::NormalizationUnavailable, "hankel-exact normalization needs N <= 12");
      Eigen::VectorXd out(g);
      for (Eigen::Index i = 0; i < g; ++i) {
        out(i) = log_exp_moment_exact(grid.points(i), gamma, n, measure.potential());
      }
      return out;
    }
    case Normalization::Surrogate: {
      Eigen::VectorXd base(g);
      for (Eigen::Index i = 0; i < g; ++i) {
        const double x = grid.points(i);
        base(i) = 0.5 * gamma * gamma * std::log(static_cast<double>(n)) +
                  0.75 * gamma * gamma * std::log(std::max(1e-300, 1.0 - x * x));
      }
      Eigen::VectorXd mean_ratio = Eigen::VectorXd::Zero(g);
      for (const auto& s : replicas) mean_ratio += (log_tilt(s, measure, gamma, grid) - base).array().exp().matrix();
      mean_ratio /= static_cast<double>(replicas.size());
      const double log_c = std::log(grid.weights.dot(mean_ratio) / grid.length());
      return base.array() + log_c;
    }
  }
  return Eigen::VectorXd::Zero(g);
}

ChaosMeasure normalized_density(const Spectrum& spectrum, const EquilibriumMeasure& measure, double gamma,
                                const Grid& grid, const Eigen::VectorXd& log_norm, Normalization kind) {
  ChaosMeasure m;
  m.grid = grid;
  m.gamma = gamma;
  m.normalization = kind;
  m.density = (log_tilt(spectrum, measure, gamma, grid) - log_norm).array().exp();
  return m;
}

ChaosMeasure chaos_density(std::span<const Spectrum> replicas, const EquilibriumMeasure& measure, double gamma,
                           const Grid& grid, Normalization kind, int designated) {
  const auto norm = log_normalizer(replicas, measure, gamma, grid, kind);
  return normalized_density(replicas[designated], measure, gamma, grid, norm, kind);
}

ThickPointReport thick_points(const CountingField& field, double gamma, int sign) {
  const int n = field.n();
  const double tau = gamma * std::log(static_cast<double>(n)) / kJump;
  const auto& meas = field.measure();
  std::vector<double> p = {-1.0};
  for (Eigen::Index j = 0; j < field.eigenvalues().size(); ++j) {
    const double l = field.eigenvalues()(j);
    if (l > -1.0 && l < 1.0) p.push_back(l);
  }
  p.push_back(1.0);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double a = p[i], b = p[i + 1];
    if (!(b > a)) continue;
    const int c = field.count(a);
    if (sign > 0) {
      // c - N F(x) >= tau  <=>  F(x) <= (c - tau)/N
      const double u = (c - tau) / n;
      if (u < meas.cdf(a)) continue;
      const double q = u >= meas.cdf(b) ? b : meas.quantile_in(u, a, b);
      total += std::max(0.0, q - a);
    } else {
      const double u = (c + tau) / n;
      if (u > meas.cdf(b)) continue;
      const double q = u <= meas.cdf(a) ? a : meas.quantile_in(u, a, b);
      total += std::max(0.0, b - q);
    }
  }
  ThickPointReport r{gamma, sign > 0 ? 1 : -1, std::clamp(total, 0.0, 2.0), std::nullopt};
  if (r.lebesgue_measure > 0.0) r.exponent = std::log(r.lebesgue_measure) / std::log(static_cast<double>(n));
  return r;
}

double log_partition(const CountingField& field, double gamma) {
  const int n = field.n();
  const auto& meas = field.measure();
  const double rate = gamma * kJump;
  std::vector<double> p = {-1.0};
  for (Eigen::Index j = 0; j < field.eigenvalues().size(); ++j) {
    const double l = field.eigenvalues()(j);
    if (l > -1.0 && l < 1.0) p.push_back(l);
  }
  p.push_back(1.0);
  const auto& rule = quad::gauss_legendre<double>(24);
  std::vector<double> logs;
  logs.reserve(p.size());
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double a = p[i], b = p[i + 1];
    if (!(b > a)) continue;
    const int c = field.count(a);
    // x = cos(theta); h = sqrt2 pi (c - N F) on (a, b)
    const double th_lo = std::acos(b), th_hi = std::acos(a);
    const double fa = meas.cdf(a), fb = meas.cdf(b);
    const double e_ref = rate * c - rate * n * (gamma > 0 ? fa : fb);
    const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(rate) * n * (fb - fa) / 4.0)));
    const double h = (th_hi - th_lo) / pieces;
    double s = 0.0;
    for (int q = 0; q < pieces; ++q) {
      const double lo = th_lo + q * h, half = 0.5 * h, mid = lo + half;
      for (int k = 0; k < 24; ++k) {
        const double th = mid + half * rule.nodes(k);
        const double e = rate * c - rate * n * meas.cdf_theta(th) - e_ref;
        s += rule.weights(k) * half * std::exp(e) * std::sin(th);
      }
    }
    logs.push_back(e_ref + std::log(s));
  }
  const double m = *std::max_element(logs.begin(), logs.end());
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - m);
  return m + std::log(acc);
}

double free_energy(const CountingField& field, double gamma) {
  if (!(gamma > 0.0)) throw Error(ErrorKind::DomainError, "free_energy requires gamma > 0");
  return log_partition(field, gamma) / std::log(static_cast<double>(field.n()));
}

Eigen::MatrixXd meso_log_tilts(std::span<const Spectrum> replicas, const EquilibriumMeasure& measure, double gamma,
                               double alpha, const Grid& grid) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::DomainError, "alpha must lie in (0,1)");
  const int n = replicas[0].n();
  const double eps = std::pow(static_cast<double>(n), alpha - 1.0);
  const Eigen::Index g = grid.size();
  Eigen::VectorXd mean(g);
  for (Eigen::Index i = 0; i < g; ++i) mean(i) = harmonic_extension_mean(measure, n, grid.points(i), eps);
  const double c = std::sqrt(2.0);
  Eigen::MatrixXd t(static_cast<Eigen::Index>(replicas.size()), g);
  for (std::size_t r = 0; r < replicas.size(); ++r) {
    const auto& l = replicas[r].values;
    for (Eigen::Index i = 0; i < g; ++i) {
      const double x = grid.points(i);
      double s = 0.0;
      for (Eigen::Index j = 0; j < l.size(); ++j) s += c * (0.5 * kPi + std::atan((x - l(j)) / eps));
      t(static_cast<Eigen::Index>(r), i) = gamma * (s - mean(i));
    }
  }
  return t;
}

ChaosMeasure meso_chaos_density(std::span<const Spectrum> replicas, const EquilibriumMeasure& measure, double gamma,
                                double alpha, const Grid& grid, int designated) {
  check_gamma(gamma);
  if (replicas.size() < 50) {
    throw Error(ErrorKind::InsufficientReplicas, "monte-carlo normalization needs M >= 50");
  }
  const Eigen::MatrixXd t = meso_log_tilts(replicas, measure, gamma, alpha, grid);
  ChaosMeasure m;
  m.grid = grid;
  m.gamma = gamma;
  m.normalization = Normalization::MonteCarlo;
  m.density.resize(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) m.density(i) = std::exp(t(designated, i) - log_mean_exp(t.col(i)));
  return m;
}

ChaosMeasure reference_gmc(int k, double gamma, const Grid& grid, std::uint64_t seed) {
  if (!(std::abs(gamma) < std::sqrt(2.0))) throw Error(ErrorKind::DomainError, "reference_gmc requires |gamma| < sqrt 2");
  const GaussianField f = sample_field(k, seed);
  const Eigen::VectorXd c = field_u_coeffs(f);
  ChaosMeasure m;
  m.grid = grid;
  m.gamma = gamma;
  m.normalization = Normalization::MonteCarlo;
  m.density.resize(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double x = grid.points(i);
    const double s = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
    const double xk = std::abs(x) < 1.0 ? cheb::eval_u(c, x) * s : 0.0;
    m.density(i) = std::exp(gamma * xk - 0.5 * gamma * gamma * f.variance(x));
  }
  return m;
}

}  // namespace rmtlab
