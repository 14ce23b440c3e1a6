#include <CLI11.hpp>

#include <iostream>

#include "harness/config.hpp"
#include "harness/run.hpp"
#include "rmtlab/errors.hpp"

int main(int argc, char** argv) {
  using namespace rmtlab::harness;
  CLI::App app{"rmtlab: random-matrix counting-field experiments"};
  std::string command, config_path, out;
  std::vector<std::string> overrides;
  long long seed = -1;
  int workers = 0;
  bool enforce = false, check_only = false;
  app.add_option("command", command, "experiment to run")->required()->check(CLI::IsMember(kCommands));
  app.add_option("-c,--config", config_path, "key = value config file");
  app.add_option("-s,--set", overrides, "override one key (key=value), repeatable");
  app.add_option("-o,--out", out, "output directory (default $" + std::string(kOutputRootEnv) + "/<command>)");
  app.add_option("--seed", seed, "master seed")->check(CLI::NonNegativeNumber);
  app.add_option("--workers", workers, "parallel replica workers")->check(CLI::PositiveNumber);
  app.add_flag("--enforce", enforce, "exit 4 when an acceptance rule fails");
  app.add_flag("--validate", check_only, "print diagnostics and exit without running");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigFailure;
  }

  Settings settings;
  try {
    if (!config_path.empty()) settings = load_settings(config_path);
    for (const auto& o : overrides) apply_override(settings, o);
    if (!out.empty()) settings["out"] = out;
    if (seed >= 0) settings["seed"] = std::to_string(seed);
    if (workers > 0) settings["workers"] = std::to_string(workers);
    if (enforce) settings["enforce"] = "true";
  } catch (const rmtlab::Error& e) {
    std::cerr << e.what() << "\n";
    return kConfigFailure;
  }
  const auto config = make_config(command, settings);

  if (check_only) {
    const auto diagnostics = validate(config);
    for (const auto& d : diagnostics) std::cout << d << "\n";
    return diagnostics.empty() ? kSuccess : kConfigFailure;
  }

  const auto outcome = run(config);
  const auto& s = outcome.summary;
  if (s.contains("error") && !s["error"].is_null()) {
    std::cerr << s["error"]["kind"].get<std::string>() << ": " << s["error"]["detail"].get<std::string>() << "\n";
  }
  if (s.contains("acceptance")) {
    for (const auto& a : s["acceptance"]) {
      std::cout << (a["pass"].get<bool>() ? "PASS " : "FAIL ") << a["rule"].get<std::string>() << " value=" << a["value"]
                << " range=[" << a["lo"] << ", " << a["hi"] << "]\n";
    }
  }
  std::cout << "wrote " << outcome.out_dir.string() << "/summary.json (status " << s.value("status", "error")
            << ")\n";
  return outcome.exit_code;
}
