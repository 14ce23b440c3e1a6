#include "rmtlab/sampler.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "rmtlab/errors.hpp"
#include "rmtlab/rng.hpp"

namespace rmtlab {

McmcParams McmcParams::defaults(int n) {
  McmcParams p;
  p.sweeps = 200L * n;
  p.burn_in = 50L * n;
  p.proposal_scale = 1.0 / n;
  p.thinning = n;
  return p;
}

void McmcParams::validate() const {
  if (sweeps <= 0 || burn_in <= 0 || thinning <= 0 || !(proposal_scale > 0.0)) {
    throw Error(ErrorKind::ConfigError, "MCMC parameters must all be positive");
  }
  if (burn_in >= sweeps) throw Error(ErrorKind::ConfigError, "burn_in must be smaller than sweeps");
}

Spectrum sample_gue(int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::DomainError, "sample_gue requires N >= 1");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  // H = (1/sqrt 2) tridiag(N(0,2), chi_{2(n-k)}), then scaled by 1/(2 sqrt n)
  const double scale = 1.0 / (2.0 * std::sqrt(static_cast<double>(n)));
  for (int k = 0; k < n; ++k) diag(k) = normal(rng) * scale;
  for (int k = 0; k < n - 1; ++k) {
    std::chi_squared_distribution<double> chi2(2.0 * (n - 1 - k));
    off(k) = std::sqrt(chi2(rng) / 2.0) * scale;
  }
  Spectrum s;
  if (n == 1) {
    s.values = diag;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw Error(ErrorKind::EigensolveFailure, "tridiagonal eigensolver did not converge");
    }
    s.values = es.eigenvalues();
  }
  std::sort(s.values.data(), s.values.data() + n);
  s.provenance.sampler_kind = "gue-tridiagonal";
  s.provenance.seed = seed;
  s.provenance.potential = "gue";
  return s;
}

double log_gas_density(const Potential& potential, const Eigen::VectorXd& lambda) {
  const Eigen::Index n = lambda.size();
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) s += 2.0 * std::log(std::abs(lambda(i) - lambda(j)));
    s -= static_cast<double>(n) * potential(lambda(i));
  }
  return s;
}

double metropolis_log_ratio(const Potential& potential, const Eigen::VectorXd& lambda, int i, double proposal) {
  const Eigen::Index n = lambda.size();
  const double old = lambda(i);
  double logsum = 0.0;
  double prod = 1.0;
  int chunk = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == i) continue;
    prod *= std::abs(proposal - lambda(j)) / std::abs(old - lambda(j));
    if (++chunk == 32) {
      logsum += std::log(prod);
      prod = 1.0;
      chunk = 0;
    }
  }
  logsum += std::log(prod);
  return 2.0 * logsum - static_cast<double>(n) * (potential(proposal) - potential(old));
}

ChainRun run_chain(const Potential& potential, int n, const McmcParams& params, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorKind::DomainError, "sample_invariant requires N >= 2");
  params.validate();
  const auto measure = solve_equilibrium(potential);
  const auto q = quantiles(measure, n + 1);
  Eigen::VectorXd lambda(n);
  for (int j = 0; j < n; ++j) lambda(j) = q.kappa[j];

  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, params.proposal_scale);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  long accepted = 0, proposed = 0;
  ChainRun out;
  for (long sweep = 1; sweep <= params.sweeps; ++sweep) {
    for (int i = 0; i < n; ++i) {
      const double prop = lambda(i) + normal(rng);
      const double lr = metropolis_log_ratio(potential, lambda, i, prop);
      ++proposed;
      if (lr >= 0.0 || std::log(unif(rng)) < lr) {
        lambda(i) = prop;
        ++accepted;
      }
    }
    if (sweep >= params.burn_in && (sweep - params.burn_in) % params.thinning == 0) {
      if (!lambda.allFinite() || lambda.cwiseAbs().maxCoeff() > 10.0) {
        throw Error(ErrorKind::ChainDiverged, "|lambda| > 10 after burn-in at sweep " + std::to_string(sweep));
      }
      Spectrum s;
      s.values = lambda;
      std::sort(s.values.data(), s.values.data() + n);
      s.provenance.sampler_kind = "metropolis";
      s.provenance.seed = seed;
      s.provenance.potential = potential.name();
      s.provenance.sweeps = sweep;
      out.samples.push_back(std::move(s));
    }
  }
  if (!lambda.allFinite() || lambda.cwiseAbs().maxCoeff() > 10.0) {
    throw Error(ErrorKind::ChainDiverged, "|lambda| > 10 at the end of the chain");
  }
  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(proposed);
  for (auto& s : out.samples) s.provenance.acceptance_rate = out.acceptance_rate;
  return out;
}

Spectrum sample_invariant(const Potential& potential, int n, const McmcParams& params, std::uint64_t seed) {
  ChainRun run = run_chain(potential, n, params, seed);
  Spectrum s = std::move(run.samples.back());
  s.provenance.sweeps = params.sweeps;
  return s;
}

Spectrum SamplerJob::run(std::uint64_t seed) const {
  if (kind == Kind::Gue) return sample_gue(n, seed);
  return sample_invariant(potential, n, params, seed);
}

std::vector<Spectrum> run_replicas(const SamplerJob& job, int m, std::uint64_t master_seed, int workers) {
  if (m < 1) throw Error(ErrorKind::DomainError, "run_replicas requires M >= 1");
  std::vector<Spectrum> out(m);
  std::vector<std::exception_ptr> errors(m);
  auto one = [&](int r) {
    try {
      out[r] = job.run(replica_seed(master_seed, static_cast<std::uint64_t>(r)));
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };
  workers = std::clamp(workers, 1, m);
  if (workers == 1) {
    for (int r = 0; r < m; ++r) one(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int r; (r = next.fetch_add(1)) < m;) one(r);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (int r = 0; r < m; ++r) {
    if (!errors[r]) continue;
    try {
      std::rethrow_exception(errors[r]);
    } catch (const Error& e) {
      throw Error(e.kind(), "replica " + std::to_string(r) + ": " + e.detail());
    }
  }
  return out;
}

void save_csv(const Spectrum& spectrum, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::ConfigError, "cannot write " + path.string());
  const auto& p = spectrum.provenance;
  os << "# rmtlab-spectrum v" << kSpectrumCsvVersion << "\n";
  os << "# sampler=" << p.sampler_kind << " seed=" << p.seed << " potential=" << p.potential << " n=" << spectrum.n()
     << " acceptance_rate=" << std::setprecision(17) << p.acceptance_rate << " sweeps=" << p.sweeps << "\n";
  os << "lambda\n";
  for (Eigen::Index i = 0; i < spectrum.values.size(); ++i) os << std::setprecision(17) << spectrum.values(i) << "\n";
}

Spectrum load_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::ConfigError, "cannot read " + path.string());
  std::string line;
  std::getline(is, line);
  const std::string magic = "# rmtlab-spectrum v";
  if (line.rfind(magic, 0) != 0) throw Error(ErrorKind::ConfigError, path.string() + ": not a spectrum file");
  if (std::stoi(line.substr(magic.size())) != kSpectrumCsvVersion) {
    throw Error(ErrorKind::ConfigError, path.string() + ": unsupported spectrum format version");
  }
  Spectrum s;
  std::getline(is, line);
  std::istringstream hs(line.substr(1));
  for (std::string kv; hs >> kv;) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) continue;
    const std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
    if (k == "sampler") s.provenance.sampler_kind = v;
    else if (k == "seed") s.provenance.seed = std::stoull(v);
    else if (k == "potential") s.provenance.potential = v;
    else if (k == "acceptance_rate") s.provenance.acceptance_rate = std::strtod(v.c_str(), nullptr);
    else if (k == "sweeps") s.provenance.sweeps = std::stol(v);
  }
  std::getline(is, line);
  std::vector<double> vals;
  while (std::getline(is, line)) {
    if (!line.empty()) vals.push_back(std::strtod(line.c_str(), nullptr));
  }
  if (vals.empty()) throw Error(ErrorKind::ConfigError, path.string() + ": no eigenvalues");
  s.values = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  if (!std::is_sorted(vals.begin(), vals.end())) {
    throw Error(ErrorKind::ConfigError, path.string() + ": eigenvalues not sorted");
  }
  return s;
}

}  // namespace rmtlab
