#include "queuenet/bus.hpp"

#include <algorithm>
#include <cmath>

#include "queuenet/error.hpp"

namespace queuenet {

void BusParams::validate() const {
  if (!(q_B >= 0.0 && q_B <= 1.0)) throw ValidationError("bus: q_B must lie in [0, 1]");
  if (!(mu_B > 0.0)) throw ValidationError("bus: mu_B must be > 0");
  if (c_B < 1) throw ValidationError("bus: c_B must be >= 1");
  if (K_B < 1) throw ValidationError("bus: K_B must be >= 1");
  if (N < 1) throw ValidationError("bus: N must be >= 1");
  if (!(T > 0.0)) throw ValidationError("bus: T must be > 0");
}

double BusParams::utilization(double t) const {
  return ticket_arrival_rate(lambda_B.hold(t), q_B) / (c_B * mu_B);
}

void RenewalState::validate(int N, double T) const {
  if (m0 < 0 || m0 > N) throw ValidationError("bus: aboard count m0 must lie in [0, N]");
  if (!(t0 >= 0.0 && t0 <= T)) throw ValidationError("bus: elapsed headway t0 must lie in [0, T]");
}

double ticket_arrival_rate(double lambda_B_now, double q_B) { return q_B * lambda_B_now; }

Generator build_ticket_generator(const BusParams& params) {
  params.validate();
  return build_birth_death_generator(
      params.K_B, params.c_B, params.mu_B,
      [profile = params.lambda_B, q = params.q_B](double t) { return ticket_arrival_rate(profile.hold(t), q); },
      "bus ticketing");
}

double downstream_rate(double lambda_B_now, double lambda_B1_now, double q_B, double mu_B, int c_B) {
  return lambda_B_now * (1.0 - q_B) + std::min(lambda_B1_now, c_B * mu_B);
}

RateProfile downstream_profile(const BusParams& params) {
  std::vector<double> b(params.lambda_B.breakpoints().begin(), params.lambda_B.breakpoints().end());
  std::vector<double> v;
  v.reserve(params.lambda_B.size());
  for (double lb : params.lambda_B.values()) {
    v.push_back(downstream_rate(lb, ticket_arrival_rate(lb, params.q_B), params.q_B, params.mu_B, params.c_B));
  }
  return RateProfile(std::move(b), std::move(v));
}

double mean_downstream_rate(const RateProfile& lambda_B2, double now, double T, double t0) {
  return lambda_B2.average(now, now + std::max(0.0, T - t0));
}

namespace {

// Poisson terms (rt)^j e^{-rt} / j! for j = 0 .. count-1, by a log-space
// running recurrence so that neither the factorial nor e^{-rt} under- or
// overflows on its own.
template <typename Visit>
void poisson_terms(double x, int count, Visit&& visit) {
  if (x == 0.0) {
    for (int j = 0; j < count; ++j) visit(j, j == 0 ? 1.0 : 0.0);
    return;
  }
  const double log_x = std::log(x);
  double log_term = -x;
  for (int j = 0; j < count; ++j) {
    visit(j, std::exp(log_term));
    log_term += log_x - std::log(static_cast<double>(j + 1));
  }
}

// P(Poisson(x) >= n) for x <= n, summing terms upward until they no longer
// change the total.
double upper_tail(double x, int n) {
  double log_term = static_cast<double>(n) * std::log(x) - x - std::lgamma(static_cast<double>(n) + 1.0);
  double total = 0.0;
  for (int j = n;; ++j) {
    const double term = std::exp(log_term);
    total += term;
    if (term <= total * 1e-17 || term == 0.0) break;
    log_term += std::log(x) - std::log(static_cast<double>(j + 1));
  }
  return std::min(total, 1.0);
}

}  // namespace

double erlang_cdf(int n, double rate, double t) {
  if (n < 1) throw ValidationError("erlang_cdf: order must be >= 1");
  if (!(rate > 0.0)) throw ValidationError("erlang_cdf: rate must be > 0");
  if (!(t >= 0.0)) throw ValidationError("erlang_cdf: t must be >= 0");
  if (t == 0.0) return 0.0;
  const double x = rate * t;
  if (x <= static_cast<double>(n)) return upper_tail(x, n);
  double head = 0.0;
  poisson_terms(x, n, [&](int, double term) { head += term; });
  return std::clamp(1.0 - head, 0.0, 1.0);
}

std::vector<double> erlang_cdf_orders(int n_max, double rate, double t) {
  std::vector<double> out(static_cast<std::size_t>(std::max(n_max, 0)), 0.0);
  if (n_max < 1 || t == 0.0) return out;
  std::vector<double> terms(static_cast<std::size_t>(n_max));
  poisson_terms(rate * t, n_max, [&](int j, double term) { terms[static_cast<std::size_t>(j)] = term; });
  // F_k = F_{k+1} + P(X = k), summed downward from the top order.
  double f = erlang_cdf(n_max, rate, t);
  out[static_cast<std::size_t>(n_max - 1)] = f;
  for (int k = n_max - 1; k >= 1; --k) {
    f = std::min(1.0, f + terms[static_cast<std::size_t>(k)]);
    out[static_cast<std::size_t>(k - 1)] = f;
  }
  return out;
}

double renewal_wait(const RenewalState& renewal, double lambda_B2_bar, int N, double T) {
  if (!(lambda_B2_bar >= 0.0)) throw ValidationError("renewal_wait: arrival rate must be >= 0");
  if (renewal.m0 >= N) return 0.0;
  if (lambda_B2_bar == 0.0) return 0.5 * T;
  const double F = erlang_cdf(N - renewal.m0, lambda_B2_bar, std::max(0.0, T - renewal.t0));
  return (N + 1) / (2.0 * lambda_B2_bar) * F + 0.5 * T * (1.0 - F);
}

double bus_total_sojourn(const TransientState& ticket_state, const BusParams& params,
                         const RenewalState& renewal, double lambda_B1_now, double lambda_B2_bar) {
  double ticket_term = 0.0;
  if (params.q_B > 0.0) {
    const double L_B1 = expected_index(ticket_state);
    if (lambda_B1_now > 0.0) {
      ticket_term = L_B1 / lambda_B1_now;
    } else if (L_B1 > 0.0) {
      throw UndefinedWaitError("bus: ticket waiting time undefined for zero ticket arrival rate");
    }
  }
  return ticket_term + renewal_wait(renewal, lambda_B2_bar, params.N, params.T);
}

std::vector<double> poisson_pmf_truncated(double mean, double tail_eps) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw ValidationError("Poisson mean must be finite and >= 0");
  std::vector<double> pmf;
  if (mean == 0.0) return {1.0};
  const double log_x = std::log(mean);
  double log_term = -mean;
  double cumulative = 0.0;
  for (int j = 0;; ++j) {
    const double p = std::exp(log_term);
    pmf.push_back(p);
    cumulative += p;
    if (static_cast<double>(j) >= mean && 1.0 - cumulative < tail_eps) break;
    log_term += log_x - std::log(static_cast<double>(j + 1));
  }
  pmf.back() += 1.0 - cumulative;
  return pmf;
}

BoardingProcess::BoardingProcess(int N, double T, const RenewalState& initial, double step, double tail_eps)
    : N_(N), T_(T), step_(step), tail_eps_(tail_eps) {
  if (N < 1) throw ValidationError("bus: N must be >= 1");
  if (!(T > 0.0)) throw ValidationError("bus: T must be > 0");
  if (!(step > 0.0)) throw ValidationError("bus: boarding step must be > 0");
  initial.validate(N, T);
  Atom a{initial.t0, std::vector<double>(static_cast<std::size_t>(N), 0.0)};
  if (initial.m0 >= N || initial.t0 >= T) {
    a.elapsed = 0.0;  // departs immediately
    a.aboard[0] = 1.0;
  } else {
    a.aboard[static_cast<std::size_t>(initial.m0)] = 1.0;
  }
  atoms_.push_back(std::move(a));
}

double BoardingProcess::total_mass() const {
  double total = 0.0;
  for (const Atom& a : atoms_) {
    for (double p : a.aboard) total += p;
  }
  return total;
}

double BoardingProcess::expected_aboard() const {
  double total = 0.0;
  for (const Atom& a : atoms_) {
    for (std::size_t m = 0; m < a.aboard.size(); ++m) total += static_cast<double>(m) * a.aboard[m];
  }
  return total;
}

double BoardingProcess::expected_wait(const RateProfile& lambda_B2, double now) const {
  double total = 0.0;
  for (const Atom& a : atoms_) {
    const double lambda_bar = mean_downstream_rate(lambda_B2, now, T_, a.elapsed);
    if (lambda_bar == 0.0) {
      for (double p : a.aboard) total += p * 0.5 * T_;
      continue;
    }
    const auto F = erlang_cdf_orders(N_, lambda_bar, std::max(0.0, T_ - a.elapsed));
    for (int m = 0; m < N_; ++m) {
      const double p = a.aboard[static_cast<std::size_t>(m)];
      if (p == 0.0) continue;
      const double f = F[static_cast<std::size_t>(N_ - m - 1)];
      total += p * ((N_ + 1) / (2.0 * lambda_bar) * f + 0.5 * T_ * (1.0 - f));
    }
  }
  return total;
}

void BoardingProcess::advance(const RateProfile& lambda_B2, double t_from, double t_to) {
  if (t_to < t_from) throw ValidationError("bus: boarding horizon reversed");
  const double grid = std::round(t_from / step_);
  const bool anchored = std::abs(t_from - grid * step_) <= 1e-9 * std::max(1.0, std::abs(t_from));
  auto time_of = [&](long k) {
    return anchored ? (grid + static_cast<double>(k)) * step_ : t_from + static_cast<double>(k) * step_;
  };
  const long full = static_cast<long>(std::floor((t_to - t_from) / step_ + 1e-9));
  for (long k = 0; k < full; ++k) {
    const double t = time_of(k);
    step_once(lambda_B2, t, time_of(k + 1) - t);
  }
  const double done = full > 0 ? time_of(full) : t_from;
  if (t_to - done > 1e-9 * step_) step_once(lambda_B2, done, t_to - done);
}

void BoardingProcess::step_once(const RateProfile& lambda_B2, double t, double h) {
  const auto n = static_cast<std::size_t>(N_);
  std::vector<Atom> next;
  std::vector<double> departed(n, 0.0);  // buses that left on count during this step

  auto add_atom = [&](double elapsed, std::vector<double>&& dist) {
    for (Atom& a : next) {
      if (std::abs(a.elapsed - elapsed) < 1e-9) {
        for (std::size_t m = 0; m < n; ++m) a.aboard[m] += dist[m];
        return;
      }
    }
    next.push_back(Atom{elapsed, std::move(dist)});
  };
  // Passengers beyond a full bus board the next one.
  auto wrap = [&](std::size_t m) { return m % n; };

  const auto pmf = poisson_pmf_truncated(lambda_B2.integral(t, t + h), tail_eps_);

  for (const Atom& atom : atoms_) {
    const double to_fire = T_ - atom.elapsed;
    if (to_fire > h + 1e-12) {
      std::vector<double> stay(n, 0.0);
      for (std::size_t m = 0; m < n; ++m) {
        const double p = atom.aboard[m];
        if (p == 0.0) continue;
        for (std::size_t a = 0; a < pmf.size(); ++a) {
          const std::size_t total = m + a;
          if (total < n) stay[total] += p * pmf[a];
          else departed[wrap(total - n)] += p * pmf[a];
        }
      }
      add_atom(atom.elapsed + h, std::move(stay));
      continue;
    }
    // The headway timer expires inside this step.
    const double tau = std::clamp(to_fire, 0.0, h);
    const auto before = poisson_pmf_truncated(lambda_B2.integral(t, t + tau), tail_eps_);
    const auto after = poisson_pmf_truncated(lambda_B2.integral(t + tau, t + h), tail_eps_);
    std::vector<double> restarted(n, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
      const double p = atom.aboard[m];
      if (p == 0.0) continue;
      for (std::size_t a1 = 0; a1 < before.size(); ++a1) {
        const double pa = p * before[a1];
        if (m + a1 >= n) {
          for (std::size_t a2 = 0; a2 < after.size(); ++a2) departed[wrap(m + a1 - n + a2)] += pa * after[a2];
        } else {
          for (std::size_t a2 = 0; a2 < after.size(); ++a2) {
            if (a2 < n) restarted[a2] += pa * after[a2];
            else departed[wrap(a2 - n)] += pa * after[a2];
          }
        }
      }
    }
    add_atom(h - tau, std::move(restarted));
  }
  add_atom(0.0, std::move(departed));

  // Drop atoms that carry no probability at all.
  std::erase_if(next, [](const Atom& a) {
    return std::all_of(a.aboard.begin(), a.aboard.end(), [](double p) { return p == 0.0; });
  });
  std::sort(next.begin(), next.end(), [](const Atom& x, const Atom& y) { return x.elapsed > y.elapsed; });
  atoms_ = std::move(next);
}

double bus_stranded_count(const TransientState& ticket_state, const RenewalState& renewal) {
  return expected_index(ticket_state) + static_cast<double>(renewal.m0);
}

double bus_stranded_count(const TransientState& ticket_state, const BoardingProcess& boarding) {
  return expected_index(ticket_state) + boarding.expected_aboard();
}

}  // namespace queuenet
