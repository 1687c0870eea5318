#include "queuenet/ctmc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>

#include "queuenet/error.hpp"

namespace queuenet {

TransientState TransientState::point_mass(std::size_t dim, std::size_t index, double t) {
  if (index >= dim) throw ValidationError("point mass index outside state space");
  TransientState s{std::vector<double>(dim, 0.0), t};
  s.probs[index] = 1.0;
  return s;
}

void TransientState::validate(double tol) const {
  if (probs.empty()) throw ValidationError("empty probability vector");
  for (double p : probs) {
    if (!std::isfinite(p) || p < -kNegativeTol || p > 1.0 + kNegativeTol) {
      throw ValidationError("probability entry outside [0, 1]");
    }
  }
  if (std::abs(total() - 1.0) > tol) throw ValidationError("probabilities do not sum to 1");
}

Generator::Generator(std::size_t dimension, std::string label) : dim_(dimension), label_(std::move(label)) {
  if (dim_ == 0) throw ValidationError("generator dimension must be positive");
}

Generator& Generator::add_rule(std::string event, std::ptrdiff_t delta,
                               const std::function<double(std::size_t)>& weight, RateFn rate) {
  if (delta == 0) throw ValidationError("rule '" + event + "' has no state change");
  Rule r{std::move(event), delta, std::vector<double>(dim_, 0.0), dim_, 0, std::move(rate)};
  for (std::size_t s = 0; s < dim_; ++s) {
    double w = weight(s);
    if (!std::isfinite(w) || w < 0.0) {
      throw ValidationError("rule '" + r.event + "' has an invalid weight at state " + std::to_string(s));
    }
    if (w == 0.0) continue;
    auto target = static_cast<std::ptrdiff_t>(s) + delta;
    if (target < 0 || target >= static_cast<std::ptrdiff_t>(dim_)) {
      throw ValidationError("rule '" + r.event + "' leaves the state space from state " + std::to_string(s));
    }
    r.weight[s] = w;
    r.lo = std::min(r.lo, s);
    r.hi = s + 1;
  }
  if (r.hi == 0) r.lo = 0;
  rules_.push_back(std::move(r));
  return *this;
}

double Generator::rule_rate(const Rule& r, double t) const {
  double v = r.rate(t);
  if (!std::isfinite(v) || v < 0.0) {
    throw ValidationError("rule '" + r.event + "' of " + label_ + " produced a negative or non-finite rate");
  }
  return v;
}

void Generator::apply(std::span<const double> p, double t, std::span<double> out,
                      const simd::KernelTable& kernels) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (const Rule& r : rules_) {
    if (r.lo >= r.hi) continue;
    double scale = rule_rate(r, t);
    if (scale == 0.0) continue;
    kernels.band_flow(out.data(), p.data(), r.weight.data(), scale, r.delta, r.lo, r.hi);
  }
}

void Generator::apply_right(std::span<const double> v, double t, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (const Rule& r : rules_) {
    double scale = rule_rate(r, t);
    for (std::size_t s = r.lo; s < r.hi; ++s) {
      double q = scale * r.weight[s];
      out[s] += q * (v[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(s) + r.delta)] - v[s]);
    }
  }
}

double Generator::rate(std::size_t from, std::size_t to, double t) const {
  double total = 0.0;
  for (const Rule& r : rules_) {
    double q = r.weight[from] * rule_rate(r, t);
    if (from == to) {
      total -= q;
    } else if (static_cast<std::ptrdiff_t>(from) + r.delta == static_cast<std::ptrdiff_t>(to)) {
      total += q;
    }
  }
  return total;
}

std::vector<double> Generator::dense(double t) const {
  std::vector<double> q(dim_ * dim_, 0.0);
  for (const Rule& r : rules_) {
    double scale = rule_rate(r, t);
    for (std::size_t s = r.lo; s < r.hi; ++s) {
      double v = scale * r.weight[s];
      auto target = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(s) + r.delta);
      q[s * dim_ + target] += v;
      q[s * dim_ + s] -= v;
    }
  }
  return q;
}

namespace {

struct Rk4Workspace {
  explicit Rk4Workspace(std::size_t n) : k1(n), k2(n), k3(n), k4(n), tmp(n) {}
  std::vector<double> k1, k2, k3, k4, tmp;
};

void rk4_into(const Generator& gen, std::span<const double> p, double t, double h,
              std::span<double> out, Rk4Workspace& w, const simd::KernelTable& kn) {
  const std::size_t n = p.size();
  const double half = 0.5 * h;
  gen.apply(p, t, w.k1, kn);
  kn.axpy(w.tmp.data(), p.data(), half, w.k1.data(), n);
  gen.apply(w.tmp, t + half, w.k2, kn);
  kn.axpy(w.tmp.data(), p.data(), half, w.k2.data(), n);
  gen.apply(w.tmp, t + half, w.k3, kn);
  kn.axpy(w.tmp.data(), p.data(), h, w.k3.data(), n);
  gen.apply(w.tmp, t + h, w.k4, kn);
  kn.rk4_combine(out.data(), p.data(), w.k1.data(), w.k2.data(), w.k3.data(), w.k4.data(), h, n);
}

std::atomic<double> g_max_sum_error{0.0};
std::atomic<double> g_min_prob{0.0};
std::atomic<long> g_steps{0};

void record_step(double total, double lowest) {
  const double err = std::abs(total - 1.0);
  double seen = g_max_sum_error.load(std::memory_order_relaxed);
  while (err > seen && !g_max_sum_error.compare_exchange_weak(seen, err, std::memory_order_relaxed)) {
  }
  seen = g_min_prob.load(std::memory_order_relaxed);
  while (lowest < seen && !g_min_prob.compare_exchange_weak(seen, lowest, std::memory_order_relaxed)) {
  }
  g_steps.fetch_add(1, std::memory_order_relaxed);
}

void check_step(std::span<const double> p, double t, const std::string& label, const simd::KernelTable& kn) {
  double lowest = kn.min(p.data(), p.size());
  double total = kn.sum(p.data(), p.size());
  record_step(total, lowest);
  if (!(lowest >= -kNegativeTol) || !(std::abs(total - 1.0) <= kStepSumTol)) {
    throw InstabilityError(label + ": RK4 step left the probability simplex at t=" + std::to_string(t) +
                               " (min=" + std::to_string(lowest) + ", sum=" + std::to_string(total) +
                               "); use a smaller dt",
                           t);
  }
}

}  // namespace

ConservationStats conservation_stats() {
  return ConservationStats{g_max_sum_error.load(), g_min_prob.load(), g_steps.load()};
}

void reset_conservation_stats() {
  g_max_sum_error.store(0.0);
  g_min_prob.store(0.0);
  g_steps.store(0);
}

TransientState rk4_step(const Generator& gen, const TransientState& state, double dt,
                        const simd::KernelTable& kernels) {
  if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
  if (state.dimension() != gen.dimension()) throw ValidationError("state and generator dimensions differ");
  Rk4Workspace w(state.dimension());
  TransientState next{std::vector<double>(state.dimension()), state.t + dt};
  rk4_into(gen, state.probs, state.t, dt, next.probs, w, kernels);
  check_step(next.probs, next.t, gen.label(), kernels);
  return next;
}

TransientState advance(const Generator& gen, TransientState state, double t_end, double dt,
                       const StepObserver& observer, const simd::KernelTable& kernels) {
  if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
  if (state.dimension() != gen.dimension()) throw ValidationError("state and generator dimensions differ");
  if (t_end < state.t) throw ValidationError("t_end precedes the initial time");

  const double t0 = state.t;
  const double grid = std::round(t0 / dt);
  const bool anchored = std::abs(t0 - grid * dt) <= 1e-9 * std::max(1.0, std::abs(t0));
  auto time_of = [&](long k) { return anchored ? (grid + static_cast<double>(k)) * dt : t0 + static_cast<double>(k) * dt; };

  const long full = static_cast<long>(std::floor((t_end - t0) / dt + 1e-9));
  Rk4Workspace w(state.dimension());
  std::vector<double> next(state.dimension());

  for (long k = 0; k < full; ++k) {
    const double t = time_of(k);
    rk4_into(gen, state.probs, t, dt, next, w, kernels);
    const double t_next = (k + 1 == full) ? std::max(time_of(k + 1), t) : time_of(k + 1);
    check_step(next, t_next, gen.label(), kernels);
    state.probs.swap(next);
    state.t = t_next;
    if (observer) observer(state);
  }
  const double tail = t_end - (full > 0 ? time_of(full) : t0);
  if (tail > 1e-9 * dt) {
    const double t = full > 0 ? time_of(full) : t0;
    rk4_into(gen, state.probs, t, tail, next, w, kernels);
    check_step(next, t_end, gen.label(), kernels);
    state.probs.swap(next);
    state.t = t_end;
    if (observer) observer(state);
  } else {
    state.t = t_end;
  }
  return state;
}

std::vector<TransientState> solve_transient(const Generator& gen, const TransientState& initial,
                                            double t_end, double dt) {
  std::vector<TransientState> out{initial};
  TransientState last = advance(gen, initial, t_end, dt, [&](const TransientState& s) { out.push_back(s); });
  if (!out.empty()) out.back().t = last.t;
  return out;
}

std::size_t poisson_upper_quantile(double mean, double tail_eps) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw ValidationError("Poisson mean must be finite and >= 0");
  if (!(tail_eps > 0.0 && tail_eps < 1.0)) throw ValidationError("tail probability must lie in (0, 1)");
  if (mean == 0.0) return 0;

  // Terms from `start` upward. For large means the mass below the mode is
  // about 1/2, so the quantile for any small tail lies above it.
  const auto start = mean < 30.0 ? std::size_t{0} : static_cast<std::size_t>(std::floor(mean));
  std::vector<double> terms;
  double pmf = std::exp(static_cast<double>(start) * std::log(mean) - mean -
                        std::lgamma(static_cast<double>(start) + 1.0));
  for (std::size_t k = start;; ++k) {
    terms.push_back(pmf);
    if (static_cast<double>(k) > mean && pmf < tail_eps * 1e-8) break;
    pmf *= mean / static_cast<double>(k + 1);
  }
  // `suffix` is P(X > start + i) while scanning down.
  double suffix = 0.0;
  std::size_t answer = start + terms.size() - 1;
  for (std::size_t i = terms.size(); i-- > 0;) {
    if (suffix >= tail_eps) break;
    answer = start + i;
    suffix += terms[i];
  }
  return answer;
}

std::size_t choose_truncation(const RateProfile& arrivals, double service_capacity, double horizon,
                              std::size_t initial_count, double tail_eps, double from) {
  (void)service_capacity;  // the bound is valid for any service capacity
  if (!(tail_eps > 0.0 && tail_eps <= 1e-3)) throw ValidationError("tail_eps must lie in (0, 1e-3]");
  if (!(horizon >= 0.0)) throw ValidationError("horizon must be >= 0");
  const double mean = arrivals.peak(from, from + horizon) * horizon;
  return initial_count + poisson_upper_quantile(mean, tail_eps);
}

Generator build_birth_death_generator(std::size_t capacity, int servers, double service_rate,
                                      RateFn arrivals, std::string label) {
  if (servers < 1) throw ValidationError(label + ": server count must be >= 1");
  if (!(service_rate > 0.0)) throw ValidationError(label + ": service rate must be > 0");
  Generator gen(capacity + 1, std::move(label));
  gen.add_rule("arrival", +1, [capacity](std::size_t n) { return n < capacity ? 1.0 : 0.0; }, std::move(arrivals));
  gen.add_rule("service", -1,
               [servers, service_rate](std::size_t n) {
                 return static_cast<double>(std::min<std::size_t>(n, static_cast<std::size_t>(servers))) * service_rate;
               },
               [](double) { return 1.0; });
  return gen;
}

double expected_count(const TransientState& state, const std::function<double(std::size_t)>& count_of_index) {
  double total = 0.0;
  for (std::size_t i = 0; i < state.probs.size(); ++i) total += state.probs[i] * count_of_index(i);
  return total;
}

double expected_count(const TransientState& state, std::span<const double> counts) {
  if (counts.size() != state.probs.size()) throw ValidationError("count vector length mismatch");
  return simd::dot(state.probs, counts);
}

double expected_index(const TransientState& state) {
  std::vector<double> counts(state.probs.size());
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] = static_cast<double>(i);
  return expected_count(state, counts);
}

void write_trajectory_header(std::ostream& out) { out << "t,index,prob\n"; }

void write_trajectory_rows(std::ostream& out, const TransientState& state, double threshold) {
  for (std::size_t i = 0; i < state.probs.size(); ++i) {
    if (state.probs[i] >= threshold) out << state.t << ',' << i << ',' << state.probs[i] << '\n';
  }
}

}  // namespace queuenet
