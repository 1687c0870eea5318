#include "queuenet/tollopt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <ostream>
#include <thread>

#include "queuenet/error.hpp"

namespace queuenet {

void AloConfig::validate() const {
  if (n_ants < 2) throw ValidationError("optimizer.n_ants must be >= 2");
  if (n_antlions < 2) throw ValidationError("optimizer.n_antlions must be >= 2");
  if (t_max < 1) throw ValidationError("optimizer.t_max must be >= 1");
  for (std::size_t k = 0; k < 3; ++k) {
    if (!std::isfinite(lower[k]) || !std::isfinite(upper[k]) || lower[k] > upper[k]) {
      throw ValidationError("optimizer.lower must not exceed optimizer.upper");
    }
  }
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<double> random_walk(int steps, Rng& rng) {
  if (steps < 1) throw ValidationError("random_walk: steps must be >= 1");
  std::vector<double> walk(static_cast<std::size_t>(steps) + 1, 0.0);
  for (std::size_t k = 1; k < walk.size(); ++k) {
    walk[k] = walk[k - 1] + ((rng() >> 63) ? 1.0 : -1.0);
  }
  return walk;
}

std::vector<double> normalize_walk(std::span<const double> walk, double lo, double hi) {
  std::vector<double> out(walk.size(), lo);
  if (walk.empty()) return out;
  const auto [mn, mx] = std::minmax_element(walk.begin(), walk.end());
  const double range = *mx - *mn;
  if (range <= 0.0) return out;
  for (std::size_t k = 0; k < walk.size(); ++k) out[k] = (walk[k] - *mn) * (hi - lo) / range + lo;
  return out;
}

double shrink_ratio(int t, int t_max) {
  const double frac = static_cast<double>(t) / static_cast<double>(t_max);
  double w = 1.0;
  if (frac > 0.95) {
    w = 6.0;
  } else if (frac > 0.9) {
    w = 5.0;
  } else if (frac > 0.75) {
    w = 4.0;
  } else if (frac > 0.5) {
    w = 3.0;
  } else if (frac > 0.1) {
    w = 2.0;
  }
  return std::max(1.0, std::pow(10.0, w) * frac);
}

TrapBounds trap_bounds(const Position& antlion, const Position& Cl, const Position& Cu, int t, int t_max,
                       Rng& rng) {
  const double I = shrink_ratio(t, t_max);
  const double s_lo = uniform01(rng) < 0.5 ? 1.0 : -1.0;
  const double s_hi = uniform01(rng) < 0.5 ? 1.0 : -1.0;
  TrapBounds b;
  for (std::size_t k = 0; k < 3; ++k) {
    double lo = std::clamp(antlion[k] + s_lo * Cl[k] / I, Cl[k], Cu[k]);
    double hi = std::clamp(antlion[k] + s_hi * Cu[k] / I, Cl[k], Cu[k]);
    if (lo > hi) std::swap(lo, hi);
    b.lo[k] = lo;
    b.hi[k] = hi;
  }
  return b;
}

std::size_t roulette_select(std::span<const double> fitness, Rng& rng) {
  if (fitness.empty()) throw ValidationError("roulette_select: empty population");
  const double best = *std::min_element(fitness.begin(), fitness.end());
  const double u = uniform01(rng);
  if (!std::isfinite(best)) return std::min(fitness.size() - 1, static_cast<std::size_t>(u * fitness.size()));
  const double delta = 1e-9 * (1.0 + std::abs(best));
  std::vector<double> w(fitness.size());
  double total = 0.0;
  for (std::size_t i = 0; i < fitness.size(); ++i) {
    w[i] = std::isfinite(fitness[i]) ? 1.0 / (fitness[i] - best + delta) : 0.0;
    total += w[i];
  }
  double target = u * total;
  std::size_t last = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    last = i;
    if (target < w[i]) return i;
    target -= w[i];
  }
  return last;
}

namespace {

std::vector<Evaluation> evaluate_batch(const FitnessFn& fitness, const std::vector<Position>& xs, int threads) {
  std::vector<Evaluation> out(xs.size());
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), xs.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = fitness(xs[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < xs.size(); i = next++) out[i] = fitness(xs[i]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

double walk_coordinate(double lo, double hi, int t, int t_max, Rng& rng) {
  const std::vector<double> walk = normalize_walk(random_walk(t_max, rng), lo, hi);
  return walk[static_cast<std::size_t>(t)];
}

Position walk_around(const Position& centre, const Position& Cl, const Position& Cu, int t, int t_max, Rng& rng) {
  const TrapBounds b = trap_bounds(centre, Cl, Cu, t, t_max, rng);
  Position p{};
  for (std::size_t k = 0; k < 3; ++k) p[k] = walk_coordinate(b.lo[k], b.hi[k], t, t_max, rng);
  return p;
}

}  // namespace

AloResult alo_minimize(const FitnessFn& fitness, const AloConfig& cfg, int threads) {
  cfg.validate();
  Rng rng(cfg.seed);
  const Position& Cl = cfg.lower;
  const Position& Cu = cfg.upper;
  auto uniform_position = [&] {
    Position p{};
    for (std::size_t k = 0; k < 3; ++k) p[k] = Cl[k] + uniform01(rng) * (Cu[k] - Cl[k]);
    return p;
  };

  std::vector<Position> antlions(static_cast<std::size_t>(cfg.n_antlions));
  for (Position& p : antlions) p = uniform_position();
  std::vector<Position> ants(static_cast<std::size_t>(cfg.n_ants));
  for (Position& p : ants) p = uniform_position();

  std::vector<Evaluation> antlion_eval = evaluate_batch(fitness, antlions, threads);
  std::vector<double> antlion_fit(antlions.size());
  for (std::size_t i = 0; i < antlions.size(); ++i) antlion_fit[i] = antlion_eval[i].fitness;

  AloResult result;
  const auto best0 = static_cast<std::size_t>(
      std::min_element(antlion_fit.begin(), antlion_fit.end()) - antlion_fit.begin());
  result.elite = antlions[best0];
  result.eval = antlion_eval[best0];
  result.history.push_back({0, result.elite, result.eval});

  for (int t = 1; t <= cfg.t_max; ++t) {
    for (Position& ant : ants) {
      const std::size_t j = roulette_select(antlion_fit, rng);
      const Position ra = walk_around(antlions[j], Cl, Cu, t, cfg.t_max, rng);
      const Position re = walk_around(result.elite, Cl, Cu, t, cfg.t_max, rng);
      for (std::size_t k = 0; k < 3; ++k) ant[k] = std::clamp((ra[k] + re[k]) / 2.0, Cl[k], Cu[k]);
    }
    const std::vector<Evaluation> ant_eval = evaluate_batch(fitness, ants, threads);

    for (std::size_t i = 0; i < ants.size(); ++i) {
      const std::size_t slot = i % antlions.size();
      if (ant_eval[i].fitness < antlion_fit[slot]) {
        antlions[slot] = ants[i];
        antlion_eval[slot] = ant_eval[i];
        antlion_fit[slot] = ant_eval[i].fitness;
      }
    }
    const auto best = static_cast<std::size_t>(
        std::min_element(antlion_fit.begin(), antlion_fit.end()) - antlion_fit.begin());
    if (antlion_fit[best] < result.eval.fitness) {
      result.elite = antlions[best];
      result.eval = antlion_eval[best];
    }
    result.history.push_back({t, result.elite, result.eval});
  }
  return result;
}

Evaluation toll_fitness(const TollScheme& tolls, const Scenario& scenario, const NetworkState& initial,
                        const MswaConfig& cfg) {
  try {
    const MswaResult eq = mswa_solve(initial, scenario, tolls, cfg);
    const CongestionReport& r = eq.report;
    return Evaluation{r.L_max, {r.L_X, r.L_B, r.L_S}, eq.shares};
  } catch (const Error&) {
    return Evaluation{std::numeric_limits<double>::infinity(), {}, {}};
  }
}

AloResult alo_optimize(const Scenario& scenario, const NetworkState& initial, const AloConfig& cfg,
                       const MswaConfig& mswa_cfg, int threads) {
  auto fitness = [&](const Position& p) { return toll_fitness(to_tolls(p), scenario, initial, mswa_cfg); };
  return alo_minimize(fitness, cfg, threads);
}

void write_history_csv(std::ostream& out, const std::vector<AloRecord>& history) {
  out << "iter,J_X,J_B,J_S,fitness,L_X,L_B,L_S,alpha,beta,gamma\n" << std::setprecision(10);
  for (const AloRecord& r : history) {
    const Evaluation& e = r.eval;
    out << r.iter << ',' << r.elite[0] << ',' << r.elite[1] << ',' << r.elite[2] << ',' << e.fitness << ','
        << e.stranded[0] << ',' << e.stranded[1] << ',' << e.stranded[2] << ',' << e.shares.alpha << ','
        << e.shares.beta << ',' << e.shares.gamma << '\n';
  }
}

}  // namespace queuenet
