#include "harness/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "rmtlab/chaos.hpp"
#include "rmtlab/counting.hpp"
#include "rmtlab/eqmeasure.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/hankel.hpp"
#include "rmtlab/painleve.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/sampler.hpp"
#include "rmtlab/stats.hpp"

namespace rmtlab::harness {

namespace fs = std::filesystem;

namespace {

struct Context {
  Context(const ExperimentConfig& config, fs::path out) : c(config), dir(std::move(out)) {}

  const ExperimentConfig& c;
  fs::path dir;
  Json records = Json::array();
  Json results = Json::object();
  std::vector<Acceptance> acceptance;
  std::vector<std::string> files;

  void csv(const std::string& name, const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    write_csv(dir / name, header, rows);
    files.push_back(name);
  }
};

Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::string tag(double g) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", g);
  return buf;
}

double median_of(std::vector<double> v) { return v.empty() ? std::nan("") : stats::median(v); }

std::vector<double> uniform_points(const GridSpec& g) {
  std::vector<double> x(static_cast<std::size_t>(g.cells) + 1);
  for (int i = 0; i <= g.cells; ++i) x[i] = i == g.cells ? g.hi : g.lo + (g.hi - g.lo) * i / g.cells;
  return x;
}

SamplerJob sampler_job(const ExperimentConfig& c) {
  SamplerJob job;
  job.n = c.n;
  if (c.sampler == "mcmc") {
    job.kind = SamplerJob::Kind::Invariant;
    job.potential = resolve_potential(c);
    job.params = McmcParams::defaults(c.n);
    if (c.sweeps > 0) {
      job.params.sweeps = c.sweeps;
      job.params.burn_in = c.burn_in;
    }
  }
  return job;
}

std::vector<Spectrum> ensemble(const ExperimentConfig& c) {
  return run_replicas(sampler_job(c), c.replicas, c.seed, c.workers);
}

double log_mean_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().mean());
}

// (mean - target) / SE, the 3-SE rule on the replica masses
Acceptance mass_rule(const std::string& rule, const std::vector<double>& masses, double target) {
  const double mean = stats::mean(masses), se = stats::standard_error(masses);
  const double z = se > 0 ? (mean - target) / se : (std::abs(mean - target) < 1e-12 * target ? 0.0 : INFINITY);
  return {rule, z, -3.0, 3.0};
}

void run_eqm(Context& ctx) {
  const auto& c = ctx.c;
  const auto measure = solve_equilibrium(resolve_potential(c));
  std::vector<std::vector<double>> rows;
  double worst = 0.0;
  for (double x : uniform_points(c.grid)) {
    const double d = measure.density(x);
    rows.push_back({x, d});
    ctx.records.push_back(record("density", d, {{"x", x}}));
    worst = std::max(worst, std::abs(d - 2.0 / std::numbers::pi * std::sqrt(std::max(0.0, 1.0 - x * x))));
  }
  ctx.csv("data_eqm.csv", {"x", "density"}, rows);
  ctx.results["lagrange_ell"] = measure.lagrange_ell();
  ctx.results["edge_c_minus"] = measure.edge_c_minus();
  ctx.results["edge_c_plus"] = measure.edge_c_plus();
  if (c.potential_coeffs.empty() && c.potential == "gue") {
    ctx.acceptance.push_back({"eqm.semicircle_max_abs_error", worst, 0.0, 1e-12});
  }
}

void run_sample(Context& ctx) {
  const auto spectra = ensemble(ctx.c);
  for (std::size_t r = 0; r < spectra.size(); ++r) {
    char name[48];
    std::snprintf(name, sizeof name, "data_spectrum_%04zu.csv", r);
    save_csv(spectra[r], ctx.dir / name);
    ctx.files.push_back(name);
    const auto& s = spectra[r];
    ctx.records.push_back(record("lambda_max", s.values(s.n() - 1),
                                 {{"replica", r},
                                  {"seed", s.provenance.seed},
                                  {"lambda_min", s.values(0)},
                                  {"acceptance_rate", num(s.provenance.acceptance_rate)}}));
  }
}

template <typename F>
std::vector<std::vector<double>> per_replica(Context& ctx, const std::vector<Spectrum>& spectra,
                                             const EquilibriumMeasure& measure, F&& f) {
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < spectra.size(); ++r) {
    const CountingField field(spectra[r], measure);
    std::vector<double> row = {static_cast<double>(r)};
    for (const auto& [group, value] : f(field)) {
      row.push_back(value);
      ctx.records.push_back(record(group, value, {{"replica", r}, {"N", ctx.c.n}}));
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> group_values(const Json& records, const std::string& group) {
  std::vector<double> v;
  for (const auto& r : records)
    if (r["group"] == group && !r["value"].is_null()) v.push_back(r["value"].get<double>());
  return v;
}

void run_rigidity(Context& ctx) {
  const auto measure = solve_equilibrium(resolve_potential(ctx.c));
  const auto rows = per_replica(ctx, ensemble(ctx.c), measure, [](const CountingField& f) {
    return std::vector<std::pair<std::string, double>>{{"rigidity", rigidity_stat(f)}};
  });
  ctx.csv("data_rigidity.csv", {"replica", "rigidity"}, rows);
  ctx.acceptance.push_back({"rigidity.median", median_of(group_values(ctx.records, "rigidity")), 0.7, 1.3});
}

void run_maxfield(Context& ctx) {
  const auto measure = solve_equilibrium(resolve_potential(ctx.c));
  const double scale = std::sqrt(2.0) * std::log(static_cast<double>(ctx.c.n));
  const auto rows = per_replica(ctx, ensemble(ctx.c), measure, [&](const CountingField& f) {
    const auto e = extrema(f);
    return std::vector<std::pair<std::string, double>>{{"max", e.max_over_R / scale}, {"min", -e.min_over_R / scale}};
  });
  ctx.csv("data_maxfield.csv", {"replica", "max_scaled", "neg_min_scaled"}, rows);
  ctx.acceptance.push_back({"maxfield.max_median", median_of(group_values(ctx.records, "max")), 0.8, 1.2});
  ctx.acceptance.push_back({"maxfield.min_median", median_of(group_values(ctx.records, "min")), 0.8, 1.2});
}

void run_ks(Context& ctx) {
  const auto measure = solve_equilibrium(resolve_potential(ctx.c));
  const double n = ctx.c.n;
  const auto rows = per_replica(ctx, ensemble(ctx.c), measure, [&](const CountingField& f) {
    return std::vector<std::pair<std::string, double>>{{"ks", std::numbers::pi * n * ks_distance(f) / std::log(n)}};
  });
  ctx.csv("data_ks.csv", {"replica", "ks_scaled"}, rows);
  ctx.acceptance.push_back({"ks.median", median_of(group_values(ctx.records, "ks")), 0.7, 1.3});
}

void emit_chaos(Context& ctx, const std::string& prefix, double gamma, const Grid& grid,
                const std::vector<Eigen::VectorXd>& densities) {
  const auto& designated = densities[ctx.c.designated];
  std::vector<std::vector<double>> rows;
  for (Eigen::Index i = 0; i < grid.size(); ++i) rows.push_back({grid.points(i), designated(i)});
  ctx.csv("data_" + prefix + "_gamma" + tag(gamma) + ".csv", {"x", "density"}, rows);
  std::vector<double> masses;
  for (std::size_t r = 0; r < densities.size(); ++r) {
    masses.push_back(grid.weights.dot(densities[r]));
    ctx.records.push_back(record("mass gamma=" + tag(gamma), masses.back(), {{"replica", r}, {"gamma", gamma}}));
  }
  std::vector<double> cell_mass(designated.size());
  for (Eigen::Index i = 0; i < designated.size(); ++i) cell_mass[i] = grid.weights(i) * designated(i);
  ctx.records.push_back(record("gini gamma=" + tag(gamma), stats::gini(cell_mass),
                               {{"replica", ctx.c.designated}, {"gamma", gamma}}));
  ctx.acceptance.push_back(mass_rule(prefix + ".mean_mass_z gamma=" + tag(gamma), masses, grid.length()));
}

void run_gmc(Context& ctx) {
  const auto& c = ctx.c;
  const auto measure = solve_equilibrium(resolve_potential(c));
  const auto spectra = ensemble(c);
  const auto grid = Grid::midpoint(c.grid.lo, c.grid.hi, c.grid.cells);
  const auto kind = normalization_from_string(c.normalization);
  for (double g : c.gamma) {
    const auto norm = log_normalizer(spectra, measure, g, grid, kind);
    std::vector<Eigen::VectorXd> densities;
    for (const auto& s : spectra) densities.push_back(normalized_density(s, measure, g, grid, norm, kind).density);
    emit_chaos(ctx, "gmc", g, grid, densities);
  }
}

void run_meso(Context& ctx) {
  const auto& c = ctx.c;
  const auto measure = solve_equilibrium(resolve_potential(c));
  const auto spectra = ensemble(c);
  const auto grid = Grid::midpoint(c.grid.lo, c.grid.hi, c.grid.cells);
  // tilts are linear in gamma
  const Eigen::MatrixXd unit = meso_log_tilts(spectra, measure, 1.0, c.alpha, grid);
  for (double g : c.gamma) {
    const Eigen::MatrixXd t = g * unit;
    Eigen::VectorXd norm(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) norm(i) = log_mean_exp(t.col(i));
    std::vector<Eigen::VectorXd> densities;
    for (Eigen::Index r = 0; r < t.rows(); ++r) densities.push_back((t.row(r).transpose() - norm).array().exp().matrix());
    emit_chaos(ctx, "meso", g, grid, densities);
  }
  ctx.results["epsilon"] = std::pow(static_cast<double>(c.n), c.alpha - 1.0);
}

void run_thick(Context& ctx) {
  const auto& c = ctx.c;
  const auto measure = solve_equilibrium(resolve_potential(c));
  const auto spectra = ensemble(c);
  std::vector<std::vector<double>> rows;
  for (double g : c.gamma) {
    for (int sign : {+1, -1}) {
      const std::string group = "thick gamma=" + tag(g) + " sign=" + (sign > 0 ? "+" : "-");
      std::vector<double> exps;
      for (std::size_t r = 0; r < spectra.size(); ++r) {
        const auto rep = thick_points(CountingField(spectra[r], measure), g, sign);
        const double e = rep.exponent.value_or(-INFINITY);
        exps.push_back(e);
        ctx.records.push_back(record(group, e,
                                     {{"replica", r}, {"N", c.n}, {"gamma", g}, {"sign", sign},
                                      {"lebesgue_measure", rep.lebesgue_measure}}));
        rows.push_back({static_cast<double>(r), g, static_cast<double>(sign), rep.lebesgue_measure, e});
      }
      // an empty thick set counts as exponent -infinity
      ctx.acceptance.push_back({"thick.median_exponent gamma=" + tag(g) + " sign=" + (sign > 0 ? "+" : "-"),
                                median_of(exps), -g * g / 2 - 0.2, -g * g / 2 + 0.2});
    }
  }
  ctx.csv("data_thick.csv", {"replica", "gamma", "sign", "lebesgue_measure", "exponent"}, rows);
}

void run_freeze(Context& ctx) {
  const auto& c = ctx.c;
  const auto measure = solve_equilibrium(resolve_potential(c));
  const auto spectra = ensemble(c);
  std::vector<std::vector<double>> rows;
  for (double g : c.gamma) {
    std::vector<double> values;
    for (std::size_t r = 0; r < spectra.size(); ++r) {
      values.push_back(free_energy(CountingField(spectra[r], measure), g));
      ctx.records.push_back(record("freeze gamma=" + tag(g), values.back(), {{"replica", r}, {"N", c.n}, {"gamma", g}}));
      rows.push_back({static_cast<double>(r), g, values.back()});
    }
    const double target = g <= std::sqrt(2.0) ? g * g / 2 : std::sqrt(2.0) * g - 1;
    ctx.acceptance.push_back({"freeze.median gamma=" + tag(g), median_of(values), target - 0.2, target + 0.2});
  }
  ctx.csv("data_freeze.csv", {"replica", "gamma", "free_energy"}, rows);
}

void run_hankel(Context& ctx) {
  const auto& c = ctx.c;
  const auto potential = resolve_potential(c);
  const auto measure = solve_equilibrium(potential);
  auto spec = [&](double x1, double x2, double g1, double g2) {
    HankelSpec s;
    s.n = c.n;
    s.x1 = x1;
    s.x2 = x2;
    s.gamma1 = g1;
    s.gamma2 = g2;
    s.potential = potential;
    return s;
  };
  auto spec_json = [&](const HankelSpec& s) {
    return Json{{"N", s.n}, {"x1", s.x1}, {"x2", s.x2}, {"gamma1", s.gamma1}, {"gamma2", s.gamma2},
                {"potential", potential.name()}, {"digits", c.digits}};
  };
  auto row = [&](const std::string& group, const HankelSpec& s, double exact, double prediction) {
    ctx.records.push_back(record(group, exact - prediction,
                                 {{"spec", spec_json(s)}, {"exact", exact}, {"prediction", prediction},
                                  {"drift", exact - prediction}}));
    return std::vector<double>{s.x1, s.x2, s.gamma1, s.gamma2, exact, prediction, exact - prediction};
  };
  std::vector<std::vector<double>> rows;
  std::vector<double> drifts;
  for (double x : c.x) {
    for (double g : c.gamma) {
      const auto s = spec(x, x, g, 0.0);
      const double exact = log_hankel(s, c.digits) - log_hankel(spec(x, x, 0.0, 0.0), c.digits);
      const double pred = predict_single_jump(x, g, c.n, measure);
      rows.push_back(row("single_jump", s, exact, pred));
      drifts.push_back(exact - pred);
    }
  }
  if (c.x1 < c.x2) {
    const auto s = spec(c.x1, c.x2, c.gamma1, c.gamma2);
    const double exact = log_hankel(s, c.digits) - log_hankel(spec(c.x1, c.x1, c.gamma1 + c.gamma2, 0.0), c.digits);
    rows.push_back(row("merging", s, exact, predict_merging_jumps(c.x1, c.x2, c.gamma1, c.gamma2, c.n, measure)));
    if (c.n <= 10) {
      const auto d = diffid_y_check(s, 1e-6, c.digits);
      ctx.records.push_back(record("diffid", d.gap, {{"spec", spec_json(s)}, {"lhs", d.lhs}, {"rhs", d.rhs}}));
      ctx.acceptance.push_back({"hankel.diffid_gap", d.gap, 0.0, 1e-8});
    }
  }
  ctx.csv("data_hankel.csv", {"x1", "x2", "gamma1", "gamma2", "exact", "prediction", "drift"}, rows);
  if (drifts.size() >= 2) {
    const auto [lo, hi] = std::minmax_element(drifts.begin(), drifts.end());
    ctx.acceptance.push_back({"hankel.single_jump_drift_range", *hi - *lo, 0.0, 1.5});
  }
}

void run_pv(Context& ctx) {
  const auto& c = ctx.c;
  SigmaPVOptions o;
  o.r_min = c.r_min;
  o.r_max = c.r_max;
  o.grid_points = c.pv_grid;
  const auto s = integrate_sigma_pv(c.gamma1, c.gamma2, o);
  std::vector<std::vector<double>> rows;
  for (Eigen::Index i = 0; i < s.r_grid.size(); ++i) rows.push_back({s.r_grid(i), s.sigma(i), s.sigma_prime(i)});
  ctx.csv("data_pv.csv", {"r", "tau", "tau_prime"}, rows);
  const auto fit = fit_large_r(s);
  const auto t = sigma_pv_targets(c.gamma1, c.gamma2);
  const double res = residual(s);
  ctx.results["slope_fit"] = fit.slope;
  ctx.results["intercept_fit"] = fit.intercept;
  ctx.results["targets"] = {{"slope", t.slope}, {"intercept", t.intercept}, {"small_r_value", t.small_r_value}};
  ctx.results["residual_max"] = res;
  ctx.results["shooting_param"] = s.shooting_param;
  ctx.records.push_back(record("slope_fit", fit.slope));
  ctx.records.push_back(record("intercept_fit", fit.intercept));
  ctx.records.push_back(record("residual_max", res));
  ctx.acceptance.push_back({"pv.slope_relative_error", std::abs(fit.slope / t.slope - 1), 0.0, 0.02});
  ctx.acceptance.push_back({"pv.intercept_relative_error", std::abs(fit.intercept / t.intercept - 1), 0.0, 0.05});
  ctx.acceptance.push_back({"pv.residual_max", res, 0.0, 1e-6});
}

void run_dump_field(Context& ctx) {
  const auto& c = ctx.c;
  const auto measure = solve_equilibrium(resolve_potential(c));
  const auto spectrum = sampler_job(c).run(replica_seed(c.seed, static_cast<std::uint64_t>(c.designated)));
  const CountingField field(spectrum, measure);
  std::vector<std::vector<double>> rows;
  for (double x : uniform_points(c.grid)) rows.push_back({x, h_at(field, x)});
  ctx.csv("data_field.csv", {"x", "h"}, rows);
  const auto e = extrema(field);
  ctx.records.push_back(record("max", e.max_over_R, {{"argmax", e.argmax}}));
  ctx.records.push_back(record("min", e.min_over_R, {{"argmin", e.argmin}}));
}

Json config_json(const ExperimentConfig& c) {
  Json out = Json::object();
  std::stringstream ss(echo(c));
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find(" = ");
    out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

}  // namespace

fs::path output_dir(const ExperimentConfig& c) {
  if (!c.out.empty()) return c.out;
  const char* root = std::getenv(kOutputRootEnv);
  return fs::path(root && *root ? root : "rmtlab-out") / c.command;
}

RunOutcome run(const ExperimentConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome outcome;
  outcome.out_dir = output_dir(c);
  Context ctx(c, outcome.out_dir);
  Json error = nullptr;
  std::string status = "ok";

  const auto diagnostics = validate(c);
  try {
    fs::create_directories(ctx.dir);
  } catch (const fs::filesystem_error& e) {
    outcome.exit_code = kConfigFailure;
    outcome.summary = {{"status", "error"}, {"error", {{"kind", "ConfigError"}, {"detail", e.what()}}}};
    return outcome;
  }
  if (!diagnostics.empty()) {
    std::string detail;
    for (const auto& d : diagnostics) detail += (detail.empty() ? "" : "; ") + d;
    error = {{"kind", "ConfigError"}, {"detail", detail}, {"diagnostics", diagnostics}};
    outcome.exit_code = kConfigFailure;
  } else {
    try {
      write_text(ctx.dir / "config.echo", echo(c));
      ctx.files.push_back("config.echo");
      const auto& cmd = c.command;
      if (cmd == "eqm") run_eqm(ctx);
      else if (cmd == "sample") run_sample(ctx);
      else if (cmd == "rigidity") run_rigidity(ctx);
      else if (cmd == "maxfield") run_maxfield(ctx);
      else if (cmd == "ks") run_ks(ctx);
      else if (cmd == "gmc") run_gmc(ctx);
      else if (cmd == "meso-gmc") run_meso(ctx);
      else if (cmd == "thick") run_thick(ctx);
      else if (cmd == "freeze") run_freeze(ctx);
      else if (cmd == "hankel-check") run_hankel(ctx);
      else if (cmd == "pv-check") run_pv(ctx);
      else if (cmd == "dump-field") run_dump_field(ctx);
    } catch (const Error& e) {
      error = {{"kind", std::string(to_string(e.kind()))}, {"detail", e.detail()}};
      outcome.exit_code = e.kind() == ErrorKind::ConfigError ? kConfigFailure : kNumericalFailure;
    } catch (const std::exception& e) {
      error = {{"kind", "InternalError"}, {"detail", e.what()}};
      outcome.exit_code = kNumericalFailure;
    }
  }
  if (!error.is_null()) {
    status = "error";
  } else if (std::any_of(ctx.acceptance.begin(), ctx.acceptance.end(), [](const Acceptance& a) { return !a.pass(); })) {
    status = "acceptance-failure";
    if (c.enforce) outcome.exit_code = kAcceptanceFailure;
  }

  Json& s = outcome.summary;
  s["schema"] = kSchemaName;
  s["schema_version"] = kSchemaVersion;
  s["command"] = c.command;
  s["status"] = status;
  s["exit_code"] = outcome.exit_code;
  s["config"] = config_json(c);
  s["records"] = ctx.records;
  s["aggregates"] = aggregate(ctx.records);
  s["results"] = ctx.results;
  s["acceptance"] = to_json(ctx.acceptance);
  s["files"] = ctx.files;
  s["error"] = error;
  s["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    write_text(ctx.dir / "summary.json", s.dump(2) + "\n");
  } catch (const Error&) {
    if (outcome.exit_code == kSuccess) outcome.exit_code = kConfigFailure;
  }
  return outcome;
}

}  // namespace rmtlab::harness
