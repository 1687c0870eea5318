#pragma once
// Airport bus: M/M/c/K ticket office feeding a Min(N,T) departure process.

#include <cstddef>
#include <vector>

#include "queuenet/ctmc.hpp"
#include "queuenet/rates.hpp"

namespace queuenet {

struct BusParams {
  RateProfile lambda_B;      // passengers choosing the bus, per min
  double q_B = 0.5;          // probability of buying at the ticket office
  double mu_B = 1.0;         // per-counter ticketing rate
  int c_B = 1;               // ticket counters
  std::size_t K_B = 100;     // ticket-queue truncation level
  int N = 55;                // bus capacity
  double T = 30.0;           // maximum headway, min

  void validate() const;

  // lambda_B1(t) / (c_B mu_B)
  double utilization(double t) const;
};

// Passengers already aboard (m0) and time since the last departure (t0).
struct RenewalState {
  int m0 = 0;
  double t0 = 0.0;

  void validate(int N, double T) const;
};

// lambda_B1 = q_B * lambda_B
double ticket_arrival_rate(double lambda_B_now, double q_B);

// Birth-death chain with births q_B lambda_B(t) and deaths min(n, c_B) mu_B.
Generator build_ticket_generator(const BusParams& params);

// lambda_B2 = lambda_B (1 - q_B) + min(lambda_B1, c_B mu_B)
double downstream_rate(double lambda_B_now, double lambda_B1_now, double q_B, double mu_B, int c_B);

// lambda_B2(t) as a profile on the breakpoints of lambda_B.
RateProfile downstream_profile(const BusParams& params);

// Time average of lambda_B2 over [now, now + T - t0].
double mean_downstream_rate(const RateProfile& lambda_B2, double now, double T, double t0);

// Order-n Erlang CDF, 1 - sum_{j<n} (rt)^j e^{-rt} / j!.
double erlang_cdf(int n, double rate, double t);

// F_1 .. F_{n_max} at the same (rate, t); element k holds F_{k+1}.
std::vector<double> erlang_cdf_orders(int n_max, double rate, double t);

// Min(N,T) mean wait
//   (N + 1) / (2 lambda) * F + T / 2 * (1 - F),  F = F_{N - m0}(T - t0),
// with 0 when the bus is already full and T/2 when lambda is 0.
double renewal_wait(const RenewalState& renewal, double lambda_B2_bar, int N, double T);

// Ticket-office waiting time plus renewal_wait. The ticket term is 0 when
// q_B = 0.
double bus_total_sojourn(const TransientState& ticket_state, const BusParams& params,
                         const RenewalState& renewal, double lambda_B1_now, double lambda_B2_bar);

// Distribution of the boarding process under Min(N,T): a set of atoms, each
// with a time since the last departure and a distribution over the number
// of passengers aboard (0 .. N-1). Advanced on a fixed time grid by
// convolving with Poisson arrival counts; a departure empties the bus and
// restarts the timer.
class BoardingProcess {
 public:
  struct Atom {
    double elapsed = 0.0;
    std::vector<double> aboard;
  };

  BoardingProcess(int N, double T, const RenewalState& initial, double step = 0.1, double tail_eps = 1e-9);

  void advance(const RateProfile& lambda_B2, double t_from, double t_to);

  int capacity() const { return N_; }
  double headway() const { return T_; }
  double step() const { return step_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  double total_mass() const;
  double expected_aboard() const;

  // renewal_wait averaged over the distribution, lambda-bar taken per atom
  // from lambda_B2 starting at `now`.
  double expected_wait(const RateProfile& lambda_B2, double now) const;

  friend bool operator==(const BoardingProcess&, const BoardingProcess&) = default;

 private:
  void step_once(const RateProfile& lambda_B2, double t, double h);

  int N_;
  double T_;
  double step_;
  double tail_eps_;
  std::vector<Atom> atoms_;
};

// Expected ticket-queue length plus expected passengers aboard.
double bus_stranded_count(const TransientState& ticket_state, const RenewalState& renewal);
double bus_stranded_count(const TransientState& ticket_state, const BoardingProcess& boarding);

// Poisson(mean) probabilities for 0, 1, ... truncated once the remaining
// tail is below tail_eps; the remainder is folded into the last entry.
std::vector<double> poisson_pmf_truncated(double mean, double tail_eps);

}  // namespace queuenet
