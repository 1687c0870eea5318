#pragma once
// Double-ended passenger/taxi matching queue with exponential matching time,
// solved as a level-dependent two-dimensional CTMC.

#include <cstddef>
#include <vector>

#include "queuenet/ctmc.hpp"
#include "queuenet/rates.hpp"

namespace queuenet {

struct TaxiParams {
  RateProfile lambda_X;  // passengers / min
  RateProfile lambda_T;  // taxis / min
  double mu = 1.0;       // matches / min
  int K_T = 1;           // taxi pool size
  std::size_t passenger_cap = 1;

  void validate() const;
};

// States (i passengers, j taxis), 0 <= i <= passenger_cap, 0 <= j <= K_T,
// stored level-major: index = i * (K_T + 1) + j.
struct TaxiState {
  TransientState chain;
  std::size_t passenger_cap = 0;
  int K_T = 0;

  static TaxiState point(std::size_t passengers, int taxis, std::size_t passenger_cap, int K_T, double t);

  std::size_t width() const { return static_cast<std::size_t>(K_T) + 1; }
  std::size_t index(std::size_t i, int j) const { return i * width() + static_cast<std::size_t>(j); }
  double prob(std::size_t i, int j) const { return chain.probs[index(i, j)]; }

  // Distribution of the passenger count (sums over j).
  std::vector<double> passenger_marginal() const;
  std::vector<double> taxi_marginal() const;

  // Highest passenger level carrying nonzero probability.
  std::size_t max_occupied_level() const;

  // Same distribution embedded in a space with a different passenger cap.
  // Throws ValidationError if mass would be dropped.
  TaxiState with_cap(std::size_t new_cap) const;
};

// Arrivals (i,j)->(i+1,j) at lambda_X(t) for i < cap; taxi arrivals
// (i,j)->(i,j+1) at lambda_T(t) for j < K_T (taxis finding a full pool are
// lost); matching (i,j)->(i-1,j-1) at mu for i,j >= 1.
Generator build_taxi_generator(const TaxiParams& params);

// Expected number of waiting passengers, sum p_{i,j} * i.
double taxi_queue_length(const TaxiState& state);
double taxi_pool_length(const TaxiState& state);

// Little's law W = L / lambda. Throws UndefinedWaitError when lambda <= 0.
double taxi_sojourn_time(double expected_passengers, double lambda_now);

}  // namespace queuenet
