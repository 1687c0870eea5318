#include "queuenet/choice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "queuenet/error.hpp"

namespace queuenet {

void ClassUtilityParams::validate() const {
  if (classes.empty()) throw ValidationError("choice: at least one passenger class is required");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("choice.tau must be > 0");
  double total = 0.0;
  for (const PassengerClass& c : classes) {
    if (!(c.proportion >= 0.0) || !std::isfinite(c.proportion)) {
      throw ValidationError("choice.class '" + c.name + "': proportion must be >= 0");
    }
    total += c.proportion;
    for (Mode m : kModes) {
      const ModeUtility& u = c[m];
      if (!std::isfinite(u.O)) throw ValidationError("choice.class '" + c.name + "': O must be finite");
      if (!(u.w_T >= 0.0) || !(u.w_O >= 0.0) || !(u.w_J >= 0.0) || !std::isfinite(u.w_T) ||
          !std::isfinite(u.w_O) || !std::isfinite(u.w_J)) {
        throw ValidationError("choice.class '" + c.name + "': weights for " + mode_name(m) + " must be >= 0");
      }
    }
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("choice: class proportions must sum to 1");
}

double systematic_utility(const ModeUtility& u, double W, double J, double tau) {
  return u.w_O * u.O - u.w_T * (W / tau) - u.w_J * J;
}

ShareVector mnl_probabilities(const std::array<double, 3>& V) {
  const double top = std::max({V[0], V[1], V[2]});
  std::array<double, 3> e{};
  for (std::size_t i = 0; i < 3; ++i) e[i] = std::exp(V[i] - top);
  const double z = e[0] + e[1] + e[2];
  ShareVector s{e[0] / z, e[1] / z, e[2] / z};
  s.gamma = 1.0 - s.alpha - s.beta;
  if (s.gamma < 0.0) s.gamma = 0.0;
  return s;
}

ShareVector aggregate_shares(const ClassUtilityParams& params, const std::array<double, 3>& W,
                             const TollScheme& tolls) {
  std::array<double, 3> acc{};
  for (const PassengerClass& c : params.classes) {
    std::array<double, 3> V{};
    for (Mode m : kModes) {
      const auto i = static_cast<std::size_t>(m);
      V[i] = systematic_utility(c[m], W[i], tolls[m], params.tau);
    }
    const ShareVector p = mnl_probabilities(V);
    for (Mode m : kModes) acc[static_cast<std::size_t>(m)] += c.proportion * p[m];
  }
  const double z = acc[0] + acc[1] + acc[2];
  return ShareVector{acc[0] / z, acc[1] / z, acc[2] / z};
}

}  // namespace queuenet
