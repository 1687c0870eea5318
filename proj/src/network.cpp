#include "queuenet/network.hpp"

#include <algorithm>
#include <iomanip>

#include "queuenet/error.hpp"

namespace queuenet {
namespace {

std::size_t highest_occupied(const TransientState& s) {
  for (std::size_t i = s.probs.size(); i-- > 0;) {
    if (s.probs[i] != 0.0) return i;
  }
  return 0;
}

TransientState with_capacity(const TransientState& s, std::size_t capacity) {
  TransientState out{s.probs, s.t};
  out.probs.resize(std::max(capacity, highest_occupied(s)) + 1, 0.0);
  return out;
}

std::size_t capacity_for(const RateProfile& arrivals, const TransientState& s, std::size_t configured,
                         const Scenario& sc, double horizon) {
  std::size_t k = choose_truncation(arrivals, 0.0, horizon, highest_occupied(s), sc.solver.tail_eps, s.t);
  return std::max({k, configured, std::size_t{1}});
}

template <typename F>
double wait_or_sentinel(F&& f, double sentinel) {
  try {
    return f();
  } catch (const UndefinedWaitError&) {
    return sentinel;
  }
}

BusParams bus_params(const Scenario& sc, const RateProfile& lambda_B, std::size_t K_B) {
  return BusParams{lambda_B, sc.bus.q_B, sc.bus.mu_B, sc.bus.c_B, K_B, sc.bus.N, sc.bus.T};
}

SubwayParams subway_params(const Scenario& sc, const RateProfile& lambda_S, std::size_t K1, std::size_t K2) {
  const SubwayConfig& c = sc.subway;
  return SubwayParams{lambda_S, c.q_S, c.mu_S1, c.mu_S2, c.c_S1, c.c_S2, K1, K2, c.M, c.order, c.has_security};
}

TransientState run_chain(const Generator& gen, const TransientState& s, double t_end, double dt) {
  try {
    return advance(gen, s, t_end, dt);
  } catch (const InstabilityError& e) {
    throw InstabilityError(std::string("predict: ") + e.what(), e.time());
  }
}

}  // namespace

Mode CongestionReport::worst_mode() const {
  if (L_X >= L_B && L_X >= L_S) return Mode::Taxi;
  return L_B >= L_S ? Mode::Bus : Mode::Subway;
}

NetworkState NetworkState::initial(const Scenario& sc) {
  const double t = sc.start;
  auto queue = [t](int n) {
    return TransientState::point_mass(static_cast<std::size_t>(std::max(n, 1)) + 1, static_cast<std::size_t>(n), t);
  };
  const auto cap = static_cast<std::size_t>(std::max(sc.taxi.initial_passengers, 1));
  return NetworkState{
      TaxiState::point(static_cast<std::size_t>(sc.taxi.initial_passengers), sc.taxi.initial_taxis, cap, sc.taxi.K_T, t),
      queue(sc.bus.initial_ticket_queue),
      BoardingProcess(sc.bus.N, sc.bus.T, RenewalState{sc.bus.initial_aboard, sc.bus.initial_elapsed},
                      sc.bus.boarding_step),
      queue(sc.subway.initial_security_queue),
      queue(sc.subway.initial_ticket_queue),
      t};
}

CongestionReport congestion_criteria(const std::array<double, 3>& waits, const std::array<double, 3>& stranded,
                                     const ShareVector& shares, double t) {
  shares.validate(1e-9);
  CongestionReport r;
  r.t = t;
  r.W_X = waits[0];
  r.W_B = waits[1];
  r.W_S = waits[2];
  r.L_X = stranded[0];
  r.L_B = stranded[1];
  r.L_S = stranded[2];
  r.W_mean = shares.alpha * r.W_X + shares.beta * r.W_B + shares.gamma * r.W_S;
  r.L_max = std::max({r.L_X, r.L_B, r.L_S});
  r.shares = shares;
  return r;
}

CongestionReport evaluate(const NetworkState& state, const ModeStreams& streams, const Scenario& sc) {
  const double t = state.t;
  const double sentinel = sc.solver.max_wait;

  const double lambda_X = streams.taxi.hold(t);
  const double L_X = taxi_queue_length(state.taxi);
  const double W_X = lambda_X > 0.0 ? taxi_sojourn_time(L_X, lambda_X) : (L_X > 0.0 ? sentinel : 0.0);

  const BusParams bus = bus_params(sc, streams.bus, state.ticket.dimension() - 1);
  const double lambda_B1 = ticket_arrival_rate(streams.bus.hold(t), bus.q_B);
  const double L_B1 = expected_index(state.ticket);
  double ticket_wait = 0.0;
  if (bus.q_B > 0.0) ticket_wait = lambda_B1 > 0.0 ? L_B1 / lambda_B1 : (L_B1 > 0.0 ? sentinel : 0.0);
  const double W_B = ticket_wait + state.boarding.expected_wait(downstream_profile(bus), t);
  const double L_B = L_B1 + state.boarding.expected_aboard();

  const SubwayParams sub = subway_params(sc, streams.subway, state.security.dimension() - 1,
                                         state.subway_ticket.dimension() - 1);
  const double lambda_S = streams.subway.hold(t);
  const double L_S1 = expected_index(state.security);
  const double L_S2 = expected_index(state.subway_ticket);
  const double L_S = (sub.has_security ? L_S1 : 0.0) + L_S2;
  double W_S = sub.M;
  if (lambda_S > 0.0) {
    W_S = wait_or_sentinel(
        [&] {
          return subway_sojourn(state.security, state.subway_ticket, sub, lambda_S,
                                subway_stage_rates(sub, lambda_S).ticket);
        },
        sentinel);
  } else if (L_S > 0.0) {
    W_S = sentinel;
  }

  return congestion_criteria({W_X, W_B, W_S}, {L_X, L_B, L_S}, streams.shares, t);
}

Prediction predict(const NetworkState& initial, const ModeStreams& streams, const Scenario& sc, double horizon) {
  if (!(horizon > 0.0)) throw ValidationError("predict: horizon must be > 0");
  const double t0 = initial.t;
  const double t1 = t0 + horizon;
  const double dt = sc.solver.dt;
  Prediction out{initial, {}};
  NetworkState& s = out.state;

  {
    const std::size_t cap = std::max({choose_truncation(streams.taxi, sc.taxi.mu, horizon,
                                                        initial.taxi.max_occupied_level(), sc.solver.tail_eps, t0),
                                      sc.taxi.passenger_cap, std::size_t{1}});
    s.taxi = initial.taxi.with_cap(std::max(cap, initial.taxi.max_occupied_level()));
    TaxiParams params{streams.taxi, sc.rates.taxi_supply, sc.taxi.mu, sc.taxi.K_T, s.taxi.passenger_cap};
    s.taxi.chain = run_chain(build_taxi_generator(params), s.taxi.chain, t1, dt);
  }
  {
    const RateProfile ticket_arrivals = streams.bus.scaled(sc.bus.q_B);
    const std::size_t K_B = capacity_for(ticket_arrivals, initial.ticket, sc.bus.K_B, sc, horizon);
    s.ticket = with_capacity(initial.ticket, K_B);
    const BusParams bus = bus_params(sc, streams.bus, s.ticket.dimension() - 1);
    s.ticket = run_chain(build_ticket_generator(bus), s.ticket, t1, dt);
    s.boarding.advance(downstream_profile(bus), t0, t1);
  }
  {
    // lambda_S bounds the security arrivals in either stage order.
    const std::size_t K1 = capacity_for(streams.subway, initial.security, sc.subway.K_S1, sc, horizon);
    const std::size_t K2 = capacity_for(streams.subway.scaled(sc.subway.q_S), initial.subway_ticket,
                                        sc.subway.K_S2, sc, horizon);
    s.security = with_capacity(initial.security, K1);
    s.subway_ticket = with_capacity(initial.subway_ticket, K2);
    const SubwayParams sub = subway_params(sc, streams.subway, s.security.dimension() - 1,
                                           s.subway_ticket.dimension() - 1);
    s.security = run_chain(build_security_generator(sub), s.security, t1, dt);
    s.subway_ticket = run_chain(build_subway_ticket_generator(sub), s.subway_ticket, t1, dt);
  }
  s.t = t1;
  out.report = evaluate(s, streams, sc);
  return out;
}

void write_report_header(std::ostream& out) { out << "t,W_X,W_B,W_S,L_X,L_B,L_S,W_mean,L_max\n"; }

void write_report_row(std::ostream& out, const CongestionReport& r) {
  out << std::setprecision(10) << r.t << ',' << r.W_X << ',' << r.W_B << ',' << r.W_S << ',' << r.L_X << ','
      << r.L_B << ',' << r.L_S << ',' << r.W_mean << ',' << r.L_max << '\n';
}

}  // namespace queuenet
