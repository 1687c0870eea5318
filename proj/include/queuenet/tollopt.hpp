#pragma once
// Ant lion optimizer over toll schemes; the objective is the maximum
// stranded count at the lower-level equilibrium.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "queuenet/config.hpp"
#include "queuenet/equilibrium.hpp"
#include "queuenet/network.hpp"

namespace queuenet {

using Rng = std::mt19937_64;
using Position = std::array<double, 3>;

// Uniform on [0, 1) from the top 53 bits.
double uniform01(Rng& rng);

// Cumulative sum of `steps` independent +-1 steps, starting at 0.
std::vector<double> random_walk(int steps, Rng& rng);

// Affine map of [min walk, max walk] onto [lo, hi]; a constant walk maps to lo.
std::vector<double> normalize_walk(std::span<const double> walk, double lo, double hi);

// Trap shrink ratio max(1, 10^w t / t_max) with the 2/3/4/5/6 w schedule.
double shrink_ratio(int t, int t_max);

struct TrapBounds {
  Position lo{};
  Position hi{};
};

// lo = antlion +- Cl / I and hi = antlion +- Cu / I with independent random
// signs, clamped to [Cl, Cu] and ordered.
TrapBounds trap_bounds(const Position& antlion, const Position& Cl, const Position& Cu, int t, int t_max, Rng& rng);

// Index drawn with weight 1 / (f - best + delta), delta = 1e-9 (1 + |best|).
// Infinite fitness gets weight 0 unless every entry is infinite.
std::size_t roulette_select(std::span<const double> fitness, Rng& rng);

struct Evaluation {
  double fitness = 0.0;
  std::array<double, 3> stranded{};
  ShareVector shares;
};

using FitnessFn = std::function<Evaluation(const Position&)>;

struct AloRecord {
  int iter = 0;
  Position elite{};
  Evaluation eval;
};

struct AloResult {
  Position elite{};
  Evaluation eval;
  std::vector<AloRecord> history;  // iteration 0 is the initial population
};

// Generic minimizer. Random draws happen on the calling thread before each
// batch is evaluated on `threads` workers, so results do not depend on the
// thread count.
AloResult alo_minimize(const FitnessFn& fitness, const AloConfig& cfg, int threads = 1);

// L_max at the equilibrium under `tolls`; solver errors give +infinity.
Evaluation toll_fitness(const TollScheme& tolls, const Scenario& scenario, const NetworkState& initial,
                        const MswaConfig& cfg);

AloResult alo_optimize(const Scenario& scenario, const NetworkState& initial, const AloConfig& cfg,
                       const MswaConfig& mswa_cfg, int threads = 1);

inline TollScheme to_tolls(const Position& p) { return TollScheme{p[0], p[1], p[2]}; }

void write_history_csv(std::ostream& out, const std::vector<AloRecord>& history);

}  // namespace queuenet
