#include "queuenet/subway.hpp"

#include <algorithm>

#include "queuenet/error.hpp"

namespace queuenet {

void SubwayParams::validate() const {
  if (!(q_S >= 0.0 && q_S <= 1.0)) throw ValidationError("subway: q_S must lie in [0, 1]");
  if (!(mu_S1 > 0.0) || !(mu_S2 > 0.0)) throw ValidationError("subway: service rates must be > 0");
  if (c_S1 < 1 || c_S2 < 1) throw ValidationError("subway: server counts must be >= 1");
  if (K_S1 < 1 || K_S2 < 1) throw ValidationError("subway: truncation levels must be >= 1");
  if (!(M >= 0.0)) throw ValidationError("subway: M must be >= 0");
}

StageRates subway_stage_rates(const SubwayParams& p, double lambda_S) {
  StageRates r;
  if (p.order == SubwayOrder::SecurityFirst) {
    r.security = lambda_S;
    r.ticket = p.q_S * std::min(p.c_S1 * p.mu_S1, lambda_S);
  } else {
    r.ticket = p.q_S * lambda_S;
    r.security = std::min(r.ticket, p.c_S2 * p.mu_S2) + (1.0 - p.q_S) * lambda_S;
  }
  return r;
}

Generator build_security_generator(const SubwayParams& params) {
  params.validate();
  return build_birth_death_generator(
      params.K_S1, params.c_S1, params.mu_S1,
      [params](double t) { return subway_stage_rates(params, params.lambda_S.hold(t)).security; },
      "subway security");
}

Generator build_subway_ticket_generator(const SubwayParams& params) {
  params.validate();
  return build_birth_death_generator(
      params.K_S2, params.c_S2, params.mu_S2,
      [params](double t) { return subway_stage_rates(params, params.lambda_S.hold(t)).ticket; },
      "subway ticketing");
}

double subway_sojourn(const TransientState& security, const TransientState& ticket,
                      const SubwayParams& params, double lambda_S_now, double lambda_S2_now) {
  if (!(lambda_S_now > 0.0)) {
    throw UndefinedWaitError("subway: waiting time undefined for zero passenger arrival rate");
  }
  double w = params.M;
  if (params.has_security) w += expected_index(security) / lambda_S_now;
  if (lambda_S2_now > 0.0) w += params.q_S * expected_index(ticket) / lambda_S2_now;
  return w;
}

}  // namespace queuenet
