#pragma once
// The ground-access queueing network: taxi, bus and subway submodels
// advanced together from a common snapshot.

#include <ostream>

#include "queuenet/bus.hpp"
#include "queuenet/config.hpp"
#include "queuenet/ctmc.hpp"
#include "queuenet/subway.hpp"
#include "queuenet/taxi.hpp"

namespace queuenet {

struct NetworkState {
  TaxiState taxi;
  TransientState ticket;          // bus ticket office
  BoardingProcess boarding;       // passengers aboard the waiting bus
  TransientState security;        // subway security check
  TransientState subway_ticket;   // subway ticket counters
  double t = 0.0;

  // Point masses at the scenario's initial counts.
  static NetworkState initial(const Scenario& scenario);
};

struct CongestionReport {
  double t = 0.0;
  double W_X = 0.0, W_B = 0.0, W_S = 0.0;
  double L_X = 0.0, L_B = 0.0, L_S = 0.0;
  double W_mean = 0.0;
  double L_max = 0.0;
  ShareVector shares;

  double waiting(Mode m) const { return m == Mode::Taxi ? W_X : (m == Mode::Bus ? W_B : W_S); }
  double stranded(Mode m) const { return m == Mode::Taxi ? L_X : (m == Mode::Bus ? L_B : L_S); }
  Mode worst_mode() const;
};

// W_mean = alpha W_X + beta W_B + gamma W_S and L_max = max(L_X, L_B, L_S).
CongestionReport congestion_criteria(const std::array<double, 3>& waits, const std::array<double, 3>& stranded,
                                     const ShareVector& shares, double t = 0.0);

struct Prediction {
  NetworkState state;
  CongestionReport report;
};

// Advances every chain by `horizon` minutes under the per-mode arrival
// streams and reports the congestion criteria at the final time stamp.
// Truncation levels are enlarged as needed for the horizon.
Prediction predict(const NetworkState& initial, const ModeStreams& streams, const Scenario& scenario,
                   double horizon);

// Report for a snapshot without advancing it.
CongestionReport evaluate(const NetworkState& state, const ModeStreams& streams, const Scenario& scenario);

void write_report_header(std::ostream& out);
void write_report_row(std::ostream& out, const CongestionReport& report);

}  // namespace queuenet
