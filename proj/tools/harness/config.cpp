#include "harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "rmtlab/errors.hpp"

namespace rmtlab::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string canonical_key(std::string key) {
  if (key == "N") return "n";
  if (key == "M") return "replicas";
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

std::vector<std::string> split_list(std::string v) {
  v = trim(v);
  if (v.size() >= 2 && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_long(const std::string& s, long long& out) {
  try {
    std::size_t pos = 0;
    out = std::stoll(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_real(v[i]);
  return s;
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Settings parse_settings(const std::string& text) {
  Settings s;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty()) {
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    }
    s[canonical_key(trim(line.substr(0, eq)))] = trim(line.substr(eq + 1));
  }
  return s;
}

Settings load_settings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_settings(buf.str());
}

void apply_override(Settings& settings, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty()) {
    throw Error(ErrorKind::ConfigError, "override '" + assignment + "' is not key=value");
  }
  settings[canonical_key(trim(assignment.substr(0, eq)))] = trim(assignment.substr(eq + 1));
}

ExperimentConfig make_config(const std::string& command, const Settings& settings) {
  ExperimentConfig c;
  c.command = command;
  auto bad = [&](const std::string& key, const std::string& value, const std::string& what) {
    c.parse_errors.push_back(key + " = '" + value + "': expected " + what);
  };
  auto real = [&](double& field) {
    return [&field, bad](const std::string& k, const std::string& v) {
      if (!parse_double(v, field)) bad(k, v, "a real number");
    };
  };
  auto integer = [&](auto& field) {
    return [&field, bad](const std::string& k, const std::string& v) {
      long long t = 0;
      if (!parse_long(v, t)) return bad(k, v, "an integer");
      field = static_cast<std::remove_reference_t<decltype(field)>>(t);
    };
  };
  auto reals = [&](std::vector<double>& field) {
    return [&field, bad](const std::string& k, const std::string& v) {
      field.clear();
      for (const auto& item : split_list(v)) {
        double t = 0;
        if (!parse_double(item, t)) return bad(k, v, "a list of real numbers");
        field.push_back(t);
      }
    };
  };
  auto text = [&](std::string& field) { return [&field](const std::string&, const std::string& v) { field = v; }; };

  std::map<std::string, std::function<void(const std::string&, const std::string&)>> handlers = {
      {"potential",
       [&](const std::string& k, const std::string& v) {
         std::vector<double> coeffs;
         bool numeric = !split_list(v).empty();
         for (const auto& item : split_list(v)) {
           double t = 0;
           if (!parse_double(item, t)) numeric = false;
           coeffs.push_back(t);
         }
         if (numeric) {
           c.potential = "custom";
           c.potential_coeffs = coeffs;
         } else if (v.find(',') != std::string::npos) {
           bad(k, v, "a potential name or a list of V' Chebyshev coefficients");
         } else {
           c.potential = v;
           c.potential_coeffs.clear();
         }
       }},
      {"n", integer(c.n)},
      {"replicas", integer(c.replicas)},
      {"gamma", reals(c.gamma)},
      {"alpha", real(c.alpha)},
      {"seed",
       [&](const std::string& k, const std::string& v) {
         long long t = 0;
         if (!parse_long(v, t) || t < 0) return bad(k, v, "a nonnegative integer");
         c.seed = static_cast<std::uint64_t>(t);
       }},
      {"grid_lo", real(c.grid.lo)},
      {"grid_hi", real(c.grid.hi)},
      {"grid_cells", integer(c.grid.cells)},
      {"out", text(c.out)},
      {"digits", integer(c.digits)},
      {"workers", integer(c.workers)},
      {"sampler", text(c.sampler)},
      {"normalization", text(c.normalization)},
      {"x", reals(c.x)},
      {"x1", real(c.x1)},
      {"x2", real(c.x2)},
      {"gamma1", real(c.gamma1)},
      {"gamma2", real(c.gamma2)},
      {"r_min", real(c.r_min)},
      {"r_max", real(c.r_max)},
      {"pv_grid", integer(c.pv_grid)},
      {"sweeps", integer(c.sweeps)},
      {"burn_in", integer(c.burn_in)},
      {"designated", integer(c.designated)},
      {"enforce",
       [&](const std::string& k, const std::string& v) {
         if (v == "true" || v == "1") c.enforce = true;
         else if (v == "false" || v == "0") c.enforce = false;
         else bad(k, v, "true or false");
       }},
  };
  for (const auto& [key, value] : settings) {
    auto it = handlers.find(key);
    if (it == handlers.end()) {
      c.unknown_keys.push_back(key);
      continue;
    }
    it->second(key, value);
  }
  return c;
}

std::string echo(const ExperimentConfig& c) {
  std::map<std::string, std::string> kv = {
      {"command", c.command},
      {"potential", c.potential_coeffs.empty() ? c.potential : join(c.potential_coeffs)},
      {"n", std::to_string(c.n)},
      {"replicas", std::to_string(c.replicas)},
      {"gamma", join(c.gamma)},
      {"alpha", format_real(c.alpha)},
      {"seed", std::to_string(c.seed)},
      {"grid_lo", format_real(c.grid.lo)},
      {"grid_hi", format_real(c.grid.hi)},
      {"grid_cells", std::to_string(c.grid.cells)},
      {"out", c.out},
      {"digits", std::to_string(c.digits)},
      {"workers", std::to_string(c.workers)},
      {"sampler", c.sampler},
      {"normalization", c.normalization},
      {"x", join(c.x)},
      {"x1", format_real(c.x1)},
      {"x2", format_real(c.x2)},
      {"gamma1", format_real(c.gamma1)},
      {"gamma2", format_real(c.gamma2)},
      {"r_min", format_real(c.r_min)},
      {"r_max", format_real(c.r_max)},
      {"pv_grid", std::to_string(c.pv_grid)},
      {"sweeps", std::to_string(c.sweeps)},
      {"burn_in", std::to_string(c.burn_in)},
      {"designated", std::to_string(c.designated)},
      {"enforce", c.enforce ? "true" : "false"},
  };
  std::string s = "# rmtlab effective configuration\n";
  for (const auto& [k, v] : kv) s += k + " = " + v + "\n";
  return s;
}

Potential resolve_potential(const ExperimentConfig& c) {
  if (!c.potential_coeffs.empty()) {
    return Potential::from_derivative_cheb(
        "custom", Eigen::Map<const Eigen::VectorXd>(c.potential_coeffs.data(),
                                                     static_cast<Eigen::Index>(c.potential_coeffs.size())));
  }
  return Potential::by_name(c.potential);
}

std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> d;
  const auto& cmd = c.command;
  if (std::find(kCommands.begin(), kCommands.end(), cmd) == kCommands.end()) {
    d.push_back("unknown command '" + cmd + "'");
  }
  for (const auto& k : c.unknown_keys) d.push_back("unknown key '" + k + "'");
  for (const auto& e : c.parse_errors) d.push_back(e);
  if (c.potential_coeffs.empty() && c.potential != "gue" && c.potential != "quartic") {
    d.push_back("unknown potential '" + c.potential + "'");
  }
  if (c.n < 1) d.push_back("n must be positive");
  if (c.replicas < 1) d.push_back("replicas must be positive");
  if (c.workers < 1) d.push_back("workers must be positive");
  if (c.grid.cells < 1) d.push_back("grid_cells must be positive");
  if (c.sweeps < 0 || c.burn_in < 0) d.push_back("sweeps and burn_in must be nonnegative");
  if (c.sweeps > 0 && c.burn_in >= c.sweeps) d.push_back("burn_in must be smaller than sweeps");
  if (!(c.grid.lo < c.grid.hi) || c.grid.lo < -1.0 || c.grid.hi > 1.0) {
    d.push_back("grid must satisfy -1 <= grid_lo < grid_hi <= 1");
  }
  if (c.digits != 50 && c.digits != 100 && c.digits != 200) d.push_back("digits must be one of 50, 100, 200");
  if (c.sampler != "tridiagonal" && c.sampler != "mcmc") d.push_back("sampler must be tridiagonal or mcmc");
  const bool samples = cmd != "eqm" && cmd != "hankel-check" && cmd != "pv-check";
  if (samples && c.sampler == "tridiagonal" && (c.potential != "gue" || !c.potential_coeffs.empty())) {
    d.push_back("the tridiagonal sampler only supports the gue potential; use sampler = mcmc");
  }
  if (c.designated < 0 || c.designated >= std::max(1, c.replicas)) d.push_back("designated replica out of range");

  const bool needs_gamma = cmd == "gmc" || cmd == "meso-gmc" || cmd == "thick" || cmd == "freeze";
  if (needs_gamma && c.gamma.empty()) d.push_back("gamma list is empty");
  if (cmd == "gmc" || cmd == "meso-gmc") {
    for (double g : c.gamma)
      if (!(std::abs(g) < 2.0)) d.push_back("gamma " + format_real(g) + " must satisfy |gamma| < 2");
    if (c.normalization != "monte-carlo" && c.normalization != "hankel-exact" && c.normalization != "surrogate") {
      d.push_back("normalization must be monte-carlo, hankel-exact or surrogate");
    }
    const bool mc = cmd == "meso-gmc" || c.normalization == "monte-carlo";
    if (mc && c.replicas < 50) d.push_back("monte-carlo normalization needs replicas >= 50");
    if (cmd == "meso-gmc" && c.normalization != "monte-carlo") {
      d.push_back("meso-gmc supports monte-carlo normalization only");
    }
    if (cmd == "gmc" && c.normalization == "hankel-exact" && c.n > 12) {
      d.push_back("N exceeds exact-oracle cap (hankel-exact normalization needs N <= 12)");
    }
  }
  if (cmd == "meso-gmc" && !(c.alpha > 0.0 && c.alpha < 1.0)) d.push_back("alpha must lie in (0,1)");
  if (cmd == "freeze") {
    for (double g : c.gamma)
      if (!(g > 0.0)) d.push_back("freeze needs gamma > 0");
  }
  if (cmd == "thick") {
    for (double g : c.gamma)
      if (g == 0.0) d.push_back("thick needs gamma != 0");
  }
  if (cmd == "hankel-check") {
    if (c.n > 16) d.push_back("N exceeds exact-oracle cap (hankel-check needs N <= 16)");
    for (double x : c.x)
      if (!(std::abs(x) < 1.0)) d.push_back("x entries must lie in (-1,1)");
    if (c.gamma.empty()) d.push_back("gamma list is empty");
  }
  if (cmd == "pv-check") {
    if (c.gamma1 == c.gamma2) d.push_back("pv-check needs gamma1 != gamma2");
    if (!(c.r_min > 0.0 && c.r_min < 1.0 && c.r_max > 1.0)) d.push_back("pv-check needs 0 < r_min < 1 < r_max");
    if (c.pv_grid < 16) d.push_back("pv_grid must be at least 16");
  }
  return d;
}

}  // namespace rmtlab::harness
