#pragma once
// Scenario data: every parameter of one airport ground-access study.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "queuenet/rates.hpp"
#include "queuenet/subway.hpp"

namespace queuenet {

struct TollScheme {
  double J_X = 0.0;
  double J_B = 0.0;
  double J_S = 0.0;

  double operator[](Mode m) const { return m == Mode::Taxi ? J_X : (m == Mode::Bus ? J_B : J_S); }
  double& operator[](Mode m) { return m == Mode::Taxi ? J_X : (m == Mode::Bus ? J_B : J_S); }

  friend bool operator==(const TollScheme&, const TollScheme&) = default;
};

struct RatesConfig {
  RateProfile total;                   // all departing passengers, per min
  RateProfile taxi_supply;             // taxis per min
  std::optional<ShareVector> shares;   // fixed shares for `predict`; static MNL when absent

  friend bool operator==(const RatesConfig&, const RatesConfig&) = default;
};

struct TaxiConfig {
  double mu = 3.0;
  int K_T = 20;
  int initial_passengers = 0;
  int initial_taxis = 0;
  std::size_t passenger_cap = 0;  // 0: chosen from the arrival bound

  friend bool operator==(const TaxiConfig&, const TaxiConfig&) = default;
};

struct BusConfig {
  double q_B = 0.5;
  double mu_B = 1.0;
  int c_B = 2;
  int N = 55;
  double T = 30.0;
  std::size_t K_B = 0;  // 0: chosen from the arrival bound
  int initial_ticket_queue = 0;
  int initial_aboard = 0;        // m0
  double initial_elapsed = 0.0;  // t0
  double boarding_step = 0.1;

  friend bool operator==(const BusConfig&, const BusConfig&) = default;
};

struct SubwayConfig {
  double q_S = 0.3;
  double mu_S1 = 8.0;
  double mu_S2 = 1.0;
  int c_S1 = 2;
  int c_S2 = 2;
  std::size_t K_S1 = 0;
  std::size_t K_S2 = 0;
  double M = 2.0;
  SubwayOrder order = SubwayOrder::SecurityFirst;
  bool has_security = true;
  int initial_security_queue = 0;
  int initial_ticket_queue = 0;

  friend bool operator==(const SubwayConfig&, const SubwayConfig&) = default;
};

// Utility terms of one mode for one passenger class.
struct ModeUtility {
  double O = 0.0;    // static utility
  double w_T = 1.0;  // queue-time weight
  double w_O = 1.0;  // static-utility weight
  double w_J = 1.0;  // toll weight

  friend bool operator==(const ModeUtility&, const ModeUtility&) = default;
};

struct PassengerClass {
  std::string name;
  double proportion = 1.0;
  std::array<ModeUtility, 3> modes{};  // indexed by Mode

  const ModeUtility& operator[](Mode m) const { return modes[static_cast<std::size_t>(m)]; }

  friend bool operator==(const PassengerClass&, const PassengerClass&) = default;
};

struct ClassUtilityParams {
  std::vector<PassengerClass> classes;
  double tau = 10.0;  // minutes of queue time per utility unit

  void validate() const;

  friend bool operator==(const ClassUtilityParams&, const ClassUtilityParams&) = default;
};

struct SolverConfig {
  double dt = 0.005;
  double tail_eps = 1e-9;
  double max_wait = 120.0;  // substituted when a wait is undefined (zero arrivals, queue present)
  int threads = 1;

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

struct MswaConfig {
  double d = 1.0;
  double eps = 1e-4;
  int max_iter = 100;
  double t_e = 0.0;  // evaluation horizon, min; 0 means the scenario horizon

  void validate() const;

  friend bool operator==(const MswaConfig&, const MswaConfig&) = default;
};

struct AloConfig {
  int n_ants = 20;
  int n_antlions = 20;
  int t_max = 8;
  std::array<double, 3> lower{0.0, 0.0, 0.0};   // Cl per mode
  std::array<double, 3> upper{10.0, 10.0, 10.0};  // Cu per mode
  std::uint64_t seed = 42;

  void validate() const;

  friend bool operator==(const AloConfig&, const AloConfig&) = default;
};

struct Scenario {
  std::string name = "scenario";
  double start = 0.0;    // planning instant, min
  double horizon = 15.0;  // prediction window, min
  RatesConfig rates;
  TaxiConfig taxi;
  BusConfig bus;
  SubwayConfig subway;
  ClassUtilityParams choice;
  SolverConfig solver;
  MswaConfig equilibrium;
  AloConfig optimizer;

  // Throws ValidationError naming the offending field.
  void validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

}  // namespace queuenet
