#include "queuenet/equilibrium.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "queuenet/choice.hpp"
#include "queuenet/error.hpp"

namespace queuenet {

void MswaConfig::validate() const {
  if (!(d >= 0.0) || !std::isfinite(d)) throw ValidationError("equilibrium.d must be >= 0");
  if (!(eps > 0.0)) throw ValidationError("equilibrium.eps must be > 0");
  if (max_iter < 1) throw ValidationError("equilibrium.max_iter must be >= 1");
  if (!(t_e >= 0.0)) throw ValidationError("equilibrium.t_e must be >= 0");
}

double step_size(int l, double d) {
  if (l < 1) throw ValidationError("step_size: l must be >= 1");
  double denom = 0.0;
  for (int k = 1; k <= l; ++k) denom += std::pow(static_cast<double>(k), d);
  return std::pow(static_cast<double>(l), d) / denom;
}

double share_distance(const ShareVector& next, const ShareVector& current) {
  const double da = next.alpha - current.alpha;
  const double db = next.beta - current.beta;
  const double dg = next.gamma - current.gamma;
  const double l1 = std::abs(current.alpha) + std::abs(current.beta) + std::abs(current.gamma);
  return std::sqrt(da * da + db * db + dg * dg) / l1;
}

namespace {

ShareVector blend(const ShareVector& v, const ShareVector& target, double chi) {
  ShareVector out{v.alpha + chi * (target.alpha - v.alpha), v.beta + chi * (target.beta - v.beta),
                  v.gamma + chi * (target.gamma - v.gamma)};
  return out;
}

}  // namespace

MswaResult mswa_iterate(const ShareVector& v0, const ShareEvaluator& evaluate, const ShareResponse& respond,
                        const MswaConfig& cfg) {
  cfg.validate();
  MswaResult result;
  ShareVector v = v0;
  ShareVector best_next = v0;
  double best_error = std::numeric_limits<double>::infinity();
  double best_chi_denom = 0.0;
  int best_iter = 0;

  // Running sum of k^d so each step size costs O(1).
  double chi_denom = 0.0;
  for (int l = 0; l < cfg.max_iter; ++l) {
    const CongestionReport report = evaluate(v);
    const ShareVector target = respond(report);
    const double lp = std::pow(static_cast<double>(l + 1), cfg.d);
    chi_denom += lp;
    const ShareVector next = blend(v, target, lp / chi_denom);
    const double error = share_distance(next, v);
    result.trace.rows.push_back({l, v, {report.W_X, report.W_B, report.W_S}, error});
    if (error < best_error) {
      best_error = error;
      best_next = next;
      best_chi_denom = chi_denom;
      best_iter = l;
    }
    v = next;
    if (error <= cfg.eps) {
      result.converged = true;
      break;
    }
  }

  result.shares = best_next;
  result.error = best_error;
  result.report = evaluate(best_next);
  const ShareVector target = respond(result.report);
  result.residual = share_distance(target, best_next);
  const double lp = std::pow(static_cast<double>(best_iter + 2), cfg.d);
  result.next_error = share_distance(blend(best_next, target, lp / (best_chi_denom + lp)), best_next);
  return result;
}

MswaResult mswa_solve(const NetworkState& initial, const Scenario& scenario, const TollScheme& tolls,
                      const MswaConfig& cfg) {
  const double horizon = cfg.t_e > 0.0 ? cfg.t_e : scenario.horizon;
  const ShareVector v0 = aggregate_shares(scenario.choice, {0.0, 0.0, 0.0}, tolls);
  auto evaluate = [&](const ShareVector& v) {
    return predict(initial, split_streams(scenario.rates.total, v), scenario, horizon).report;
  };
  auto respond = [&](const CongestionReport& r) {
    return aggregate_shares(scenario.choice, {r.W_X, r.W_B, r.W_S}, tolls);
  };
  return mswa_iterate(v0, evaluate, respond, cfg);
}

void write_trace_csv(std::ostream& out, const MswaTrace& trace) {
  out << "iter,alpha,beta,gamma,W_X,W_B,W_S,error\n" << std::setprecision(10);
  for (const MswaIteration& r : trace.rows) {
    out << r.iter << ',' << r.shares.alpha << ',' << r.shares.beta << ',' << r.shares.gamma << ',' << r.W[0] << ','
        << r.W[1] << ',' << r.W[2] << ',' << r.error << '\n';
  }
}

}  // namespace queuenet
