#include "conveyor/reward.hpp"

#include <cmath>

namespace conveyor {

double reward_of(double area_cm2, double p_detection, double p_grasp, double k) {
  if (!(area_cm2 >= 0)) throw RewardDomainError("reward_of: area must be >= 0");
  if (!(p_detection >= 0 && p_detection <= 1)) throw RewardDomainError("reward_of: p_detection outside [0,1]");
  if (!(p_grasp >= 0 && p_grasp <= 1)) throw RewardDomainError("reward_of: p_grasp outside [0,1]");
  const double sig = 1.0 / (1.0 + std::exp(-k * area_cm2));
  return p_detection * p_grasp * sig;
}

}  // namespace conveyor
