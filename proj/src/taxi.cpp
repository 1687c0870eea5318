#include "queuenet/taxi.hpp"

#include <cmath>

#include "queuenet/error.hpp"

namespace queuenet {

void TaxiParams::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ValidationError("taxi: matching rate mu must be > 0");
  if (K_T < 1) throw ValidationError("taxi: pool size K_T must be >= 1");
  if (passenger_cap < 1) throw ValidationError("taxi: passenger_cap must be >= 1");
}

TaxiState TaxiState::point(std::size_t passengers, int taxis, std::size_t passenger_cap, int K_T, double t) {
  if (passengers > passenger_cap) throw ValidationError("taxi: initial passengers exceed the truncation level");
  if (taxis < 0 || taxis > K_T) throw ValidationError("taxi: initial taxis outside [0, K_T]");
  TaxiState s{{}, passenger_cap, K_T};
  s.chain = TransientState::point_mass((passenger_cap + 1) * s.width(), s.index(passengers, taxis), t);
  return s;
}

std::vector<double> TaxiState::passenger_marginal() const {
  std::vector<double> out(passenger_cap + 1, 0.0);
  for (std::size_t i = 0; i <= passenger_cap; ++i) {
    for (int j = 0; j <= K_T; ++j) out[i] += prob(i, j);
  }
  return out;
}

std::vector<double> TaxiState::taxi_marginal() const {
  std::vector<double> out(width(), 0.0);
  for (std::size_t i = 0; i <= passenger_cap; ++i) {
    for (int j = 0; j <= K_T; ++j) out[static_cast<std::size_t>(j)] += prob(i, j);
  }
  return out;
}

std::size_t TaxiState::max_occupied_level() const {
  for (std::size_t i = passenger_cap + 1; i-- > 0;) {
    for (int j = 0; j <= K_T; ++j) {
      if (prob(i, j) != 0.0) return i;
    }
  }
  return 0;
}

TaxiState TaxiState::with_cap(std::size_t new_cap) const {
  if (new_cap == passenger_cap) return *this;
  if (new_cap < max_occupied_level()) throw ValidationError("taxi: new cap would drop probability mass");
  TaxiState out{{std::vector<double>((new_cap + 1) * width(), 0.0), chain.t}, new_cap, K_T};
  const std::size_t keep = std::min(new_cap, passenger_cap) + 1;
  std::copy_n(chain.probs.begin(), keep * width(), out.chain.probs.begin());
  return out;
}

Generator build_taxi_generator(const TaxiParams& params) {
  params.validate();
  const std::size_t width = static_cast<std::size_t>(params.K_T) + 1;
  const std::size_t cap = params.passenger_cap;
  const auto w = static_cast<std::ptrdiff_t>(width);
  Generator gen((cap + 1) * width, "taxi");

  gen.add_rule("passenger arrival", w, [=](std::size_t s) { return s / width < cap ? 1.0 : 0.0; },
               [profile = params.lambda_X](double t) { return profile.hold(t); });
  gen.add_rule("taxi arrival", 1,
               [=](std::size_t s) { return s % width < width - 1 ? 1.0 : 0.0; },
               [profile = params.lambda_T](double t) { return profile.hold(t); });
  gen.add_rule("matching", -(w + 1),
               [=](std::size_t s) { return (s / width >= 1 && s % width >= 1) ? 1.0 : 0.0; },
               [mu = params.mu](double) { return mu; });
  return gen;
}

double taxi_queue_length(const TaxiState& state) {
  double total = 0.0;
  const std::size_t w = state.width();
  for (std::size_t i = 1; i <= state.passenger_cap; ++i) {
    total += static_cast<double>(i) * simd::sum(std::span<const double>(state.chain.probs).subspan(i * w, w));
  }
  return total;
}

double taxi_pool_length(const TaxiState& state) {
  auto m = state.taxi_marginal();
  double total = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) total += static_cast<double>(j) * m[j];
  return total;
}

double taxi_sojourn_time(double expected_passengers, double lambda_now) {
  if (!(lambda_now > 0.0)) throw UndefinedWaitError("taxi: waiting time undefined for zero passenger arrival rate");
  return expected_passengers / lambda_now;
}

}  // namespace queuenet
