#pragma once

#include <filesystem>

#include "harness/config.hpp"
#include "harness/report.hpp"

namespace rmtlab::harness {

enum ExitCode { kSuccess = 0, kConfigFailure = 2, kNumericalFailure = 3, kAcceptanceFailure = 4 };

struct RunOutcome {
  int exit_code = kSuccess;
  Json summary;
  std::filesystem::path out_dir;
};

/// <out> from the config, else $RMTLAB_OUTPUT_ROOT/<command>, else rmtlab-out/<command>.
std::filesystem::path output_dir(const ExperimentConfig& config);

/// Validates, executes and writes config.echo, data_*.csv and summary.json.
/// Never throws for experiment failures: they become the error record and exit code.
RunOutcome run(const ExperimentConfig& config);

}  // namespace rmtlab::harness
