#include "queuenet/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "queuenet/choice.hpp"
#include "queuenet/equilibrium.hpp"
#include "queuenet/error.hpp"
#include "queuenet/network.hpp"
#include "queuenet/scenario.hpp"
#include "queuenet/tollopt.hpp"

namespace queuenet {
namespace {

using Clock = std::chrono::steady_clock;

std::string num(double x, int precision = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << x;
  return s.str();
}

std::ofstream open_artifact(const std::string& dir, const std::string& file, RunReport& report) {
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / file).string();
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  report.artifacts.push_back(path);
  return out;
}

ShareVector predict_shares(const Scenario& sc) {
  if (sc.rates.shares) return *sc.rates.shares;
  return aggregate_shares(sc.choice, {0.0, 0.0, 0.0}, TollScheme{});
}

void add_report_summary(RunReport& r, const CongestionReport& c) {
  r.summary.emplace_back("t", num(c.t, 2));
  r.summary.emplace_back("shares (taxi/bus/subway)",
                         num(c.shares.alpha) + " / " + num(c.shares.beta) + " / " + num(c.shares.gamma));
  r.summary.emplace_back("W_X / W_B / W_S (min)", num(c.W_X, 3) + " / " + num(c.W_B, 3) + " / " + num(c.W_S, 3));
  r.summary.emplace_back("L_X / L_B / L_S", num(c.L_X, 3) + " / " + num(c.L_B, 3) + " / " + num(c.L_S, 3));
  r.summary.emplace_back("W_mean (min)", num(c.W_mean, 3));
  r.summary.emplace_back("L_max", num(c.L_max, 3) + " (" + mode_name(c.worst_mode()) + ")");
}

template <typename F>
auto in_module(const char* module, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(std::string(module) + ": " + e.what());
  }
}

}  // namespace

Scenario apply_overrides(Scenario sc, const RunOptions& o) {
  if (o.horizon) sc.horizon = *o.horizon;
  if (o.seed) sc.optimizer.seed = *o.seed;
  if (o.dt) sc.solver.dt = *o.dt;
  if (o.threads) sc.solver.threads = *o.threads;
  sc.validate();
  return sc;
}

std::string artifact_stem(const std::string& command, const Scenario& sc) {
  return command + "_" + sc.name + "_" + std::to_string(sc.optimizer.seed);
}

RunReport cmd_predict(const Scenario& scenario, const RunOptions& options) {
  const auto t0 = Clock::now();
  RunReport r{"predict", apply_overrides(scenario, options), {}, {}, 0.0};
  const Scenario& sc = r.resolved;
  const ModeStreams streams = split_streams(sc.rates.total, predict_shares(sc));

  std::ofstream csv = open_artifact(options.out_dir, artifact_stem("predict", sc) + ".csv", r);
  std::ofstream traj;
  if (options.trajectory) {
    traj = open_artifact(options.out_dir, artifact_stem("predict", sc) + "_taxi_trajectory.csv", r);
    write_trajectory_header(traj);
  }
  write_report_header(csv);

  NetworkState state = NetworkState::initial(sc);
  CongestionReport report = in_module("network", [&] { return evaluate(state, streams, sc); });
  write_report_row(csv, report);
  if (options.trajectory) write_trajectory_rows(traj, state.taxi.chain);

  // One row per minute; a shorter last step lands on the horizon.
  const double end = sc.start + sc.horizon;
  for (int k = 1; state.t < end - 1e-9; ++k) {
    const double next = std::min(sc.start + k, end);
    Prediction p = in_module("network", [&] { return predict(state, streams, sc, next - state.t); });
    state = std::move(p.state);
    report = p.report;
    write_report_row(csv, report);
    if (options.trajectory) write_trajectory_rows(traj, state.taxi.chain);
    spdlog::debug("predict t={:.2f} L_max={:.3f}", report.t, report.L_max);
  }

  add_report_summary(r, report);
  r.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

RunReport cmd_equilibrium(const Scenario& scenario, const RunOptions& options) {
  const auto t0 = Clock::now();
  RunReport r{"equilibrium", apply_overrides(scenario, options), {}, {}, 0.0};
  const Scenario& sc = r.resolved;
  const NetworkState initial = NetworkState::initial(sc);
  const MswaResult eq =
      in_module("equilibrium", [&] { return mswa_solve(initial, sc, TollScheme{}, sc.equilibrium); });

  std::ofstream csv = open_artifact(options.out_dir, artifact_stem("equilibrium", sc) + ".csv", r);
  write_trace_csv(csv, eq.trace);

  r.summary.emplace_back("iterations", std::to_string(eq.trace.rows.size()));
  r.summary.emplace_back("converged", eq.converged ? "yes" : "no");
  r.summary.emplace_back("final error", num(eq.error, 8));
  add_report_summary(r, eq.report);
  spdlog::info("equilibrium: {} iterations, error {:.3e}", eq.trace.rows.size(), eq.error);
  r.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

RunReport cmd_optimize(const Scenario& scenario, const RunOptions& options) {
  const auto t0 = Clock::now();
  RunReport r{"optimize", apply_overrides(scenario, options), {}, {}, 0.0};
  const Scenario& sc = r.resolved;
  const NetworkState initial = NetworkState::initial(sc);
  const AloResult best = in_module("tollopt", [&] {
    return alo_optimize(sc, initial, sc.optimizer, sc.equilibrium, sc.solver.threads);
  });

  std::ofstream csv = open_artifact(options.out_dir, artifact_stem("optimize", sc) + ".csv", r);
  write_history_csv(csv, best.history);

  r.summary.emplace_back("elite tolls (taxi/bus/subway)",
                         num(best.elite[0]) + " / " + num(best.elite[1]) + " / " + num(best.elite[2]));
  r.summary.emplace_back("elite L_max", num(best.eval.fitness, 3));
  r.summary.emplace_back("baseline L_max (iteration 0 elite)", num(best.history.front().eval.fitness, 3));
  r.summary.emplace_back("equilibrium shares",
                         num(best.eval.shares.alpha) + " / " + num(best.eval.shares.beta) + " / " +
                             num(best.eval.shares.gamma));
  r.summary.emplace_back("L_X / L_B / L_S", num(best.eval.stranded[0], 3) + " / " + num(best.eval.stranded[1], 3) +
                                                " / " + num(best.eval.stranded[2], 3));
  r.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

std::string format_summary(const RunReport& report) {
  std::size_t width = 0;
  for (const auto& [label, value] : report.summary) width = std::max(width, label.size());
  std::ostringstream out;
  out << report.command << " " << report.resolved.name << "\n";
  for (const auto& [label, value] : report.summary) {
    out << "  " << std::left << std::setw(static_cast<int>(width)) << label << "  " << value << "\n";
  }
  for (const std::string& a : report.artifacts) out << "  wrote " << a << "\n";
  return out.str();
}

std::string run_report_json(const RunReport& report) {
  nlohmann::ordered_json j;
  j["command"] = report.command;
  j["scenario"] = report.resolved.name;
  j["seed"] = report.resolved.optimizer.seed;
  j["resolved_config"] = scenario_to_string(report.resolved);
  j["artifacts"] = report.artifacts;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  for (const auto& [label, value] : report.summary) summary[label] = value;
  j["summary"] = summary;
  j["wall_seconds"] = report.wall_seconds;
  return j.dump(2);
}

}  // namespace queuenet
