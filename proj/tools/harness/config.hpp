#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rmtlab/eqmeasure.hpp"

namespace rmtlab::harness {

inline const std::vector<std::string> kCommands = {"eqm",   "sample", "rigidity",     "maxfield", "ks",
                                                   "gmc",   "meso-gmc", "thick",      "freeze",   "hankel-check",
                                                   "pv-check", "dump-field"};

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "RMTLAB_OUTPUT_ROOT";

/// Raw key/value settings; list values keep their comma-separated text.
using Settings = std::map<std::string, std::string>;

/// Parses the flat config format: one `key = value` per line, '#' starts a
/// comment, lists are comma separated and may be wrapped in [ ]. Throws
/// ConfigError on malformed lines.
Settings parse_settings(const std::string& text);
Settings load_settings(const std::string& path);
/// `key=value` override; throws ConfigError if there is no '='.
void apply_override(Settings& settings, const std::string& assignment);

struct GridSpec {
  double lo = -1.0;
  double hi = 1.0;
  int cells = 200;
};

struct ExperimentConfig {
  std::string command;
  std::string potential = "gue";
  std::vector<double> potential_coeffs;  // Chebyshev-T coefficients of V' when non-empty
  int n = 200;
  int replicas = 50;
  std::vector<double> gamma;
  double alpha = 0.5;
  std::uint64_t seed = 1;
  GridSpec grid;
  std::string out;  // empty: <output root>/<command>
  int digits = 50;
  int workers = 1;
  std::string sampler = "tridiagonal";  // or "mcmc"
  std::string normalization = "monte-carlo";
  std::vector<double> x = {0.0};
  double x1 = 0.0;
  double x2 = 0.25;
  double gamma1 = 0.8;
  double gamma2 = 0.2;
  double r_min = 1e-3;
  double r_max = 40.0;
  int pv_grid = 4001;
  int sweeps = 0;  // 0: sampler default
  int burn_in = 0;
  int designated = 0;
  bool enforce = false;

  /// Keys that were set but not recognised (reported by validate).
  std::vector<std::string> unknown_keys;
  /// Values that failed to parse (reported by validate).
  std::vector<std::string> parse_errors;
};

/// Typed view of the settings. Never throws; problems land in unknown_keys and
/// parse_errors.
ExperimentConfig make_config(const std::string& command, const Settings& settings);

/// Canonical key = value lines (sorted keys, 17-digit reals), used for config.echo.
std::string echo(const ExperimentConfig& config);

/// All violations, without running anything.
std::vector<std::string> validate(const ExperimentConfig& config);

/// Potential named or given by coefficients in the config. Throws ConfigError.
Potential resolve_potential(const ExperimentConfig& config);

/// 17 significant digits.
std::string format_real(double v);

}  // namespace rmtlab::harness
