#pragma once

#include <filesystem>
#include <vector>

#include "psido/config.hpp"
#include "psido/criteria.hpp"

namespace psido {

// Exit-code contract of the tool.
enum ExitCode : int { exit_pass = 0, exit_violated = 1, exit_numerical = 2, exit_config = 3 };

struct CommandResult {
  int exit_code = exit_pass;
  std::vector<std::filesystem::path> files;
};

// singular_values.csv and schatten.json for every configured r.
CommandResult cmd_spectrum(const RunConfig& config);
// op_samples.csv and operator_matrix.{json,csv}.
CommandResult cmd_quantize(const RunConfig& config);
// criteria.json; exit 1 when any outcome is violated.
CommandResult cmd_verify(const RunConfig& config);
// atypical.json: the dyadic-symbol reproduction preset.
CommandResult cmd_atypical(const RunConfig& config);
// series.json: lemma-series sweeps.
CommandResult cmd_series(const RunConfig& config);

// Runs one criterion entry of a verify config.
std::vector<CriterionOutcome> run_criterion(const nlohmann::json& entry, const RunConfig& config);

}  // namespace psido
