#pragma once

#include <stdexcept>

namespace conveyor {

inline constexpr double kDefaultRewardK = 0.01;

class RewardDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Object reward p_detection * p_grasp * sigmoid(k * area). Always in [0, 1].
/// Throws RewardDomainError for negative area or probabilities outside [0, 1].
double reward_of(double area_cm2, double p_detection, double p_grasp, double k = kDefaultRewardK);

}  // namespace conveyor
