#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "rmtlab/eqmeasure.hpp"

namespace rmtlab {

struct Provenance {
  std::string sampler_kind;  // "gue-tridiagonal" or "metropolis"
  std::uint64_t seed = 0;
  std::string potential;
  double acceptance_rate = std::numeric_limits<double>::quiet_NaN();
  long sweeps = 0;
};

/// Sorted eigenvalues on the scale of the equilibrium measure.
struct Spectrum {
  Eigen::VectorXd values;
  Provenance provenance;

  int n() const { return static_cast<int>(values.size()); }
};

/// One sweep is N single-site proposals.
struct McmcParams {
  long sweeps = 0;
  long burn_in = 0;
  double proposal_scale = 0.0;
  long thinning = 0;

  /// scale 1/N, 200N sweeps, 50N burn-in, thinning N.
  static McmcParams defaults(int n);
  /// Throws ConfigError unless every field is positive and burn_in < sweeps.
  void validate() const;
};

/// GUE (V = 2x^2) by the Dumitriu-Edelman tridiagonal model scaled by 1/(2 sqrt N).
Spectrum sample_gue(int n, std::uint64_t seed);

/// log of prod_{i<j} |l_i - l_j|^2 exp(-N sum V(l_j)), unnormalized.
double log_gas_density(const Potential& potential, const Eigen::VectorXd& lambda);

/// log-density change when particle i moves to `proposal`; O(N).
double metropolis_log_ratio(const Potential& potential, const Eigen::VectorXd& lambda, int i, double proposal);

/// Thinned states recorded after burn-in, in chain order.
struct ChainRun {
  std::vector<Spectrum> samples;
  double acceptance_rate = 0.0;
};

/// Single-site Metropolis chain on the log-gas, started at the equilibrium quantiles.
ChainRun run_chain(const Potential& potential, int n, const McmcParams& params, std::uint64_t seed);

/// Final state of run_chain. Throws ChainDiverged if any |lambda| > 10 after burn-in.
Spectrum sample_invariant(const Potential& potential, int n, const McmcParams& params, std::uint64_t seed);

struct SamplerJob {
  enum class Kind { Gue, Invariant };
  Kind kind = Kind::Gue;
  Potential potential = Potential::gue();
  int n = 1;
  McmcParams params{};

  Spectrum run(std::uint64_t seed) const;
};

/// Replica r runs with replica_seed(master_seed, r). Output order is replica
/// order regardless of `workers`; errors are rethrown tagged with the replica.
std::vector<Spectrum> run_replicas(const SamplerJob& job, int m, std::uint64_t master_seed, int workers = 1);

/// CSV with '#' header lines (format version and provenance), then one eigenvalue per row.
void save_csv(const Spectrum& spectrum, const std::filesystem::path& path);
Spectrum load_csv(const std::filesystem::path& path);

inline constexpr int kSpectrumCsvVersion = 1;

}  // namespace rmtlab
