#pragma once
// Time-inhomogeneous CTMC transient solver: generators compiled from
// transition rules, classical RK4 stepping of P'(t) = P(t) Q(t), and
// state-space truncation.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "queuenet/kernels.hpp"
#include "queuenet/rates.hpp"

namespace queuenet {

inline constexpr double kDefaultDt = 0.005;
inline constexpr double kConservationTol = 1e-8;
inline constexpr double kNegativeTol = 1e-10;
inline constexpr double kStepSumTol = 1e-6;

struct TransientState {
  std::vector<double> probs;
  double t = 0.0;

  static TransientState point_mass(std::size_t dim, std::size_t index, double t);

  std::size_t dimension() const { return probs.size(); }
  double total() const { return simd::sum(probs); }

  // Throws ValidationError unless entries are >= -kNegativeTol, <= 1 and
  // sum to 1 within `tol`.
  void validate(double tol = kConservationTol) const;
};

using RateFn = std::function<double(double)>;

// Sparse generator Q(t). Each rule moves probability from state s to
// s + delta at rate weight(s) * rate(t); the diagonal is implied as minus
// the row's outgoing rate, so rows sum to zero by construction.
class Generator {
 public:
  Generator(std::size_t dimension, std::string label);

  // weight(s) == 0 disables the rule at s (its guard). Weights must be
  // finite and >= 0, and every enabled target must lie inside the space.
  Generator& add_rule(std::string event, std::ptrdiff_t delta,
                      const std::function<double(std::size_t)>& weight, RateFn rate);

  std::size_t dimension() const { return dim_; }
  const std::string& label() const { return label_; }
  std::size_t rule_count() const { return rules_.size(); }

  // out = p Q(t) (forward action). `out` is overwritten.
  void apply(std::span<const double> p, double t, std::span<double> out,
             const simd::KernelTable& kernels = simd::active_kernels()) const;

  // out = Q(t) v (backward action).
  void apply_right(std::span<const double> v, double t, std::span<double> out) const;

  // Single entry of Q(t), diagonal included.
  double rate(std::size_t from, std::size_t to, double t) const;

  // Row-major dense copy of Q(t); intended for small test chains.
  std::vector<double> dense(double t) const;

 private:
  struct Rule {
    std::string event;
    std::ptrdiff_t delta;
    std::vector<double> weight;
    std::size_t lo;  // enabled sources lie in [lo, hi)
    std::size_t hi;
    RateFn rate;
  };

  double rule_rate(const Rule& r, double t) const;

  std::size_t dim_;
  std::string label_;
  std::vector<Rule> rules_;
};

// Advances `state` by dt with the four-stage scheme, evaluating Q at t,
// t + dt/2 and t + dt. Throws InstabilityError if the result has an entry
// below -1e-10 or a total off by more than 1e-6.
TransientState rk4_step(const Generator& gen, const TransientState& state, double dt,
                        const simd::KernelTable& kernels = simd::active_kernels());

using StepObserver = std::function<void(const TransientState&)>;

// Steps from initial.t to t_end. Step times are k * dt on the absolute grid
// when initial.t lies on it (so split runs reproduce a single run), and
// initial.t + k * dt otherwise; a final short step lands on t_end.
// The observer, if any, sees every state after a step.
TransientState advance(const Generator& gen, TransientState initial, double t_end, double dt,
                       const StepObserver& observer = {},
                       const simd::KernelTable& kernels = simd::active_kernels());

// Worst probability-conservation figures over every RK4 step taken in the
// process since the last reset.
struct ConservationStats {
  double max_sum_error = 0.0;  // max |sum(p) - 1|
  double min_prob = 0.0;       // min entry
  long steps = 0;
};

ConservationStats conservation_stats();
void reset_conservation_stats();

// All states from initial.t to t_end, initial state included.
std::vector<TransientState> solve_transient(const Generator& gen, const TransientState& initial,
                                            double t_end, double dt);

// Smallest k with P(Poisson(mean) > k) < tail_eps.
std::size_t poisson_upper_quantile(double mean, double tail_eps);

// Truncation level for a queue that starts with `initial_count` customers
// and receives arrivals from `arrivals` over [from, from + horizon]. Service
// is ignored, so the bound holds for any service capacity.
std::size_t choose_truncation(const RateProfile& arrivals, double service_capacity, double horizon,
                              std::size_t initial_count, double tail_eps, double from);

// M/M/c/K birth-death chain on {0..capacity}: births at arrivals(t) while
// n < capacity, deaths at min(n, servers) * service_rate.
Generator build_birth_death_generator(std::size_t capacity, int servers, double service_rate,
                                      RateFn arrivals, std::string label);

// Sum_i probs[i] * count_of_index(i).
double expected_count(const TransientState& state,
                      const std::function<double(std::size_t)>& count_of_index);
double expected_count(const TransientState& state, std::span<const double> counts);

// Index-as-count mean, i.e. P * [0, 1, ..., K]^T.
double expected_index(const TransientState& state);

// Sparse trajectory dump `t,index,prob`, entries >= threshold only.
void write_trajectory_header(std::ostream& out);
void write_trajectory_rows(std::ostream& out, const TransientState& state, double threshold = 1e-12);

}  // namespace queuenet
