#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "queuenet/commands.hpp"
#include "queuenet/error.hpp"
#include "queuenet/scenario.hpp"

namespace {

void configure_logging() {
  const char* env = std::getenv("QUEUENET_LOG");
  spdlog::set_level(spdlog::level::warn);
  if (env && *env) spdlog::set_level(spdlog::level::from_str(env));
  spdlog::set_pattern("[%l] %v");
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Airport ground-access queueing network: prediction, equilibrium and toll optimization"};
  app.require_subcommand(1);

  std::string scenario_path;
  queuenet::RunOptions options;
  double horizon = 0.0, dt = 0.0;
  std::uint64_t seed = 0;
  int threads = 0;
  bool json = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("scenario", scenario_path, "Scenario file (.toml)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--horizon", horizon, "Prediction horizon, minutes")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "Random seed");
    cmd->add_option("--out", options.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--dt", dt, "RK4 step, minutes")->check(CLI::PositiveNumber);
    cmd->add_option("--threads", threads, "Worker threads for fitness evaluation")->check(CLI::PositiveNumber);
    cmd->add_flag("--json", json, "Also write a JSON run record next to the CSV");
  };

  CLI::App* predict = app.add_subcommand("predict", "Advance the network and report congestion per minute");
  add_common(predict);
  predict->add_flag("--trajectory", options.trajectory, "Also dump the taxi chain distribution");
  CLI::App* equilibrium = app.add_subcommand("equilibrium", "Solve the share / waiting-time equilibrium");
  add_common(equilibrium);
  CLI::App* optimize = app.add_subcommand("optimize", "Search queue tolls minimizing the stranded count");
  add_common(optimize);

  CLI11_PARSE(app, argc, argv);

  CLI::App* cmd = app.get_subcommands().front();
  if (cmd->count("--horizon")) options.horizon = horizon;
  if (cmd->count("--dt")) options.dt = dt;
  if (cmd->count("--seed")) options.seed = seed;
  if (cmd->count("--threads")) options.threads = threads;

  try {
    const queuenet::Scenario scenario = queuenet::load_scenario(scenario_path);
    queuenet::RunReport report;
    if (cmd == predict) {
      report = queuenet::cmd_predict(scenario, options);
    } else if (cmd == equilibrium) {
      report = queuenet::cmd_equilibrium(scenario, options);
    } else {
      report = queuenet::cmd_optimize(scenario, options);
    }
    if (json) {
      const std::string path = options.out_dir + "/" + queuenet::artifact_stem(report.command, report.resolved) + ".json";
      std::ofstream(path) << queuenet::run_report_json(report) << "\n";
      report.artifacts.push_back(path);
    }
    std::cout << queuenet::format_summary(report);
  } catch (const queuenet::ParseError& e) {
    std::cerr << "error: scenario: " << scenario_path << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
