#pragma once
// Command drivers behind the queuenet executable.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "queuenet/config.hpp"

namespace queuenet {

struct RunOptions {
  std::optional<double> horizon;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<int> threads;
  std::string out_dir = ".";
  bool trajectory = false;  // predict: also dump the taxi chain distribution
};

struct RunReport {
  std::string command;
  Scenario resolved;
  std::vector<std::string> artifacts;
  std::vector<std::pair<std::string, std::string>> summary;  // label, value
  double wall_seconds = 0.0;
};

Scenario apply_overrides(Scenario scenario, const RunOptions& options);

// `<command>_<scenario>_<seed>` without extension.
std::string artifact_stem(const std::string& command, const Scenario& scenario);

RunReport cmd_predict(const Scenario& scenario, const RunOptions& options);
RunReport cmd_equilibrium(const Scenario& scenario, const RunOptions& options);
RunReport cmd_optimize(const Scenario& scenario, const RunOptions& options);

// Aligned two-column summary table.
std::string format_summary(const RunReport& report);

// JSON run record: command, resolved scenario, artifacts, summary, wall time.
std::string run_report_json(const RunReport& report);

}  // namespace queuenet
