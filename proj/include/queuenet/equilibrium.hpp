#pragma once
// Method of successive weighted averages for the share / waiting-time
// equilibrium of the lower level.

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

#include "queuenet/config.hpp"
#include "queuenet/network.hpp"

namespace queuenet {

// chi(l) = l^d / sum_{k=1..l} k^d
double step_size(int l, double d);

struct MswaIteration {
  int iter = 0;
  ShareVector shares;            // v(l)
  std::array<double, 3> W{};     // waiting times predicted under v(l)
  double error = 0.0;            // |v(l+1) - v(l)|_2 / |v(l)|_1
};

struct MswaTrace {
  std::vector<MswaIteration> rows;
};

struct MswaResult {
  ShareVector shares;
  CongestionReport report;  // evaluated under `shares`
  MswaTrace trace;
  bool converged = false;
  double error = 0.0;       // error of the accepted iteration
  double residual = 0.0;    // |Phi(v) - v|_2 / |v|_1 at the returned shares
  double next_error = 0.0;  // error one further iteration would report
};

// Maps shares to the congestion report they produce.
using ShareEvaluator = std::function<CongestionReport(const ShareVector&)>;
// Maps a congestion report to the logit response v*.
using ShareResponse = std::function<ShareVector(const CongestionReport&)>;

MswaResult mswa_iterate(const ShareVector& v0, const ShareEvaluator& evaluate, const ShareResponse& respond,
                        const MswaConfig& cfg);

// v(0) is the logit split with zero waiting times; each iteration re-runs
// predict from `initial` over t_e (the scenario horizon when 0).
MswaResult mswa_solve(const NetworkState& initial, const Scenario& scenario, const TollScheme& tolls,
                      const MswaConfig& cfg);

double share_distance(const ShareVector& next, const ShareVector& current);

void write_trace_csv(std::ostream& out, const MswaTrace& trace);

}  // namespace queuenet
