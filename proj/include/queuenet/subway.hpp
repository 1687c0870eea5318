#pragma once
// Subway access: security check and ticket counters as independent M/M/c
// stages in tandem, followed by the wait for the next train.

#include <cstddef>
#include <utility>

#include "queuenet/ctmc.hpp"
#include "queuenet/rates.hpp"

namespace queuenet {

enum class SubwayOrder { SecurityFirst, TicketFirst };

struct SubwayParams {
  RateProfile lambda_S;
  double q_S = 0.3;         // probability of buying a ticket on the spot
  double mu_S1 = 8.0;       // security, per server
  double mu_S2 = 1.0;       // ticketing, per counter
  int c_S1 = 1;
  int c_S2 = 1;
  std::size_t K_S1 = 100;
  std::size_t K_S2 = 100;
  double M = 2.0;           // minutes until the next train leaves
  SubwayOrder order = SubwayOrder::SecurityFirst;
  bool has_security = true;

  void validate() const;
};

struct StageRates {
  double security = 0.0;  // lambda_S1
  double ticket = 0.0;    // lambda_S2
};

// Security-first: lambda_S1 = lambda_S, lambda_S2 = q_S min(c_S1 mu_S1, lambda_S).
// Ticket-first:   lambda_S2 = q_S lambda_S,
//                 lambda_S1 = min(lambda_S2, c_S2 mu_S2) + (1 - q_S) lambda_S.
StageRates subway_stage_rates(const SubwayParams& params, double lambda_S_now);

Generator build_security_generator(const SubwayParams& params);
Generator build_subway_ticket_generator(const SubwayParams& params);

// W_S = L_S1 / lambda_S + q_S L_S2 / lambda_S2 + M. The middle term is 0
// when lambda_S2 = 0; the first is dropped when the station has no
// security check. Throws UndefinedWaitError when lambda_S = 0.
double subway_sojourn(const TransientState& security, const TransientState& ticket,
                      const SubwayParams& params, double lambda_S_now, double lambda_S2_now);

}  // namespace queuenet
