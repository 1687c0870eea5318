#pragma once
// Multinomial-logit mode choice with static, queue-time and toll terms.

#include <array>

#include "queuenet/config.hpp"
#include "queuenet/rates.hpp"

namespace queuenet {

// V = w_O * O - w_T * W / tau - w_J * J
double systematic_utility(const ModeUtility& u, double W, double J, double tau);

// Logit probabilities, evaluated after subtracting the largest utility.
ShareVector mnl_probabilities(const std::array<double, 3>& V);

// Class-weighted average of the per-class logit shares.
ShareVector aggregate_shares(const ClassUtilityParams& params, const std::array<double, 3>& W,
                             const TollScheme& tolls);

}  // namespace queuenet
