#include <doctest.h>

#include <cmath>
#include <sstream>

#include "queuenet/choice.hpp"
#include "queuenet/error.hpp"
#include "queuenet/network.hpp"
#include "queuenet/scenario.hpp"
#include "scenario_path.hpp"

using namespace queuenet;

namespace {

Scenario quiet_scenario() {
  Scenario sc;
  sc.name = "quiet";
  sc.rates.total = RateProfile::constant(0.0, 0.0, 15.0);
  sc.rates.taxi_supply = RateProfile::constant(0.0, 0.0, 15.0);
  sc.rates.shares = ShareVector{0.3, 0.3, 0.4};
  sc.choice.classes = {PassengerClass{"all", 1.0, {}}};
  sc.solver.dt = 0.01;
  return sc;
}

}  // namespace

TEST_CASE("empty network is a fixed point") {
  Scenario sc = quiet_scenario();
  const ModeStreams streams = split_streams(sc.rates.total, *sc.rates.shares);
  const Prediction p = predict(NetworkState::initial(sc), streams, sc, 15.0);
  const CongestionReport& r = p.report;
  CHECK(r.t == doctest::Approx(15.0));
  CHECK(r.L_X == 0.0);
  CHECK(r.L_B == 0.0);
  CHECK(r.L_S == 0.0);
  CHECK(r.W_X == 0.0);
  CHECK(r.W_B == doctest::Approx(sc.bus.T / 2));
  CHECK(r.W_S == doctest::Approx(sc.subway.M));
}

TEST_CASE("stranded passengers with no arrivals report the wait sentinel") {
  Scenario sc = quiet_scenario();
  sc.taxi.initial_passengers = 5;
  const ModeStreams streams = split_streams(sc.rates.total, *sc.rates.shares);
  const CongestionReport r = evaluate(NetworkState::initial(sc), streams, sc);
  CHECK(r.L_X == 5.0);
  CHECK(r.W_X == sc.solver.max_wait);
}

TEST_CASE("congestion_criteria") {
  CHECK(congestion_criteria({4, 10, 6}, {0, 0, 0}, {1, 0, 0}).W_mean == 4.0);
  CHECK(congestion_criteria({1, 1, 1}, {137, 6, 84}, {}).L_max == 137.0);
  CHECK(congestion_criteria({1, 1, 1}, {137, 6, 84}, {}).worst_mode() == Mode::Taxi);
  for (ShareVector s : {ShareVector{0.2, 0.5, 0.3}, ShareVector{0, 0, 1}, ShareVector{}}) {
    CHECK(congestion_criteria({5, 5, 5}, {1, 2, 3}, s).W_mean == doctest::Approx(5.0));
  }
  const auto r = congestion_criteria({3.5, 12.25, 7.0}, {20.0, 41.5, 9.0}, {0.25, 0.35, 0.4}, 7.0);
  CHECK(r.W_mean == 0.25 * 3.5 + 0.35 * 12.25 + 0.4 * 7.0);
  CHECK(r.L_max == std::max({r.L_X, r.L_B, r.L_S}));
  CHECK(r.t == 7.0);
  CHECK_THROWS_AS(congestion_criteria({1, 1, 1}, {1, 1, 1}, {0.5, 0.5, 0.5}), ValidationError);
}

TEST_CASE("initial state mirrors the scenario counts") {
  const Scenario sc = load_scenario(scenario_path("day.toml"));
  const NetworkState s = NetworkState::initial(sc);
  CHECK(taxi_queue_length(s.taxi) == sc.taxi.initial_passengers);
  CHECK(expected_index(s.ticket) == sc.bus.initial_ticket_queue);
  CHECK(s.boarding.expected_aboard() == sc.bus.initial_aboard);
  CHECK(expected_index(s.security) == sc.subway.initial_security_queue);
  CHECK(expected_index(s.subway_ticket) == sc.subway.initial_ticket_queue);
  CHECK(s.t == sc.start);
}

TEST_CASE("split horizons compose") {
  Scenario sc = load_scenario(scenario_path("night.toml"));
  sc.rates.shares = ShareVector{0.35, 0.15, 0.5};
  const ModeStreams streams = split_streams(sc.rates.total, *sc.rates.shares);
  const NetworkState s0 = NetworkState::initial(sc);
  const Prediction whole = predict(s0, streams, sc, 15.0);
  const Prediction first = predict(s0, streams, sc, 6.0);
  const Prediction second = predict(first.state, streams, sc, 9.0);
  const CongestionReport& a = whole.report;
  const CongestionReport& b = second.report;
  CHECK(b.t == doctest::Approx(a.t));
  CHECK(std::abs(a.L_X - b.L_X) <= 1e-9);
  CHECK(std::abs(a.L_B - b.L_B) <= 1e-9);
  CHECK(std::abs(a.L_S - b.L_S) <= 1e-9);
  CHECK(std::abs(a.W_X - b.W_X) <= 1e-9);
  CHECK(std::abs(a.W_B - b.W_B) <= 1e-9);
  CHECK(std::abs(a.W_S - b.W_S) <= 1e-9);
}

TEST_CASE("a mode without arrivals never gains stranded passengers") {
  Scenario sc = load_scenario(scenario_path("night.toml"));
  for (Mode m : kModes) {
    CAPTURE(mode_name(m));
    ShareVector sh{0.5, 0.5, 0.5};
    sh[m] = 0.0;
    for (Mode o : kModes)
      if (o != m) sh[o] = 0.5;
    sc.rates.shares = sh;
    const ModeStreams streams = split_streams(sc.rates.total, sh);
    NetworkState s = NetworkState::initial(sc);
    double prev = evaluate(s, streams, sc).stranded(m);
    for (int k = 0; k < 15; ++k) {
      s = predict(s, streams, sc, 1.0).state;
      const double now = evaluate(s, streams, sc).stranded(m);
      CHECK(now <= prev + 1e-9);
      prev = now;
    }
  }
}

TEST_CASE("day and night forecasts are dominated by the taxi queue") {
  for (const char* file : {"day.toml", "night.toml"}) {
    CAPTURE(file);
    const Scenario sc = load_scenario(scenario_path(file));
    const ShareVector sh = sc.rates.shares ? *sc.rates.shares : aggregate_shares(sc.choice, {0, 0, 0}, {});
    const Prediction p = predict(NetworkState::initial(sc), split_streams(sc.rates.total, sh), sc, sc.horizon);
    CHECK(p.report.worst_mode() == Mode::Taxi);
    CHECK(p.report.L_max == p.report.L_X);
    CHECK(p.report.W_mean == doctest::Approx(sh.alpha * p.report.W_X + sh.beta * p.report.W_B +
                                             sh.gamma * p.report.W_S).epsilon(1e-15));
  }
}

TEST_CASE("report CSV layout") {
  std::ostringstream out;
  write_report_header(out);
  write_report_row(out, congestion_criteria({1.5, 2, 3}, {4, 5, 6}, {0.5, 0.25, 0.25}, 2.0));
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "t,W_X,W_B,W_S,L_X,L_B,L_S,W_mean,L_max");
  CHECK(row.rfind("2,1.5,2,3,4,5,6,", 0) == 0);
}
