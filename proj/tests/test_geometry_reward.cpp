#include <doctest.h>

#include <random>

#include "conveyor/geometry.hpp"
#include "conveyor/reward.hpp"
#include "support.hpp"

using namespace conveyor;
using namespace testing_support;

TEST_CASE("pursuit time is zero when already coincident") {
  CHECK(pursuit_time({0.3, 0.1}, 0.5, {0.3, 0.1}, 0.05) == 0.0);
}

TEST_CASE("pursuit time matches quadratic and bisection oracles") {
  const double tau = pursuit_time({0, 0}, 0.5, {-0.4, 0.3}, 0.05);
  CHECK(tau == doctest::Approx(quadratic_tau({0, 0}, 0.5, {-0.4, 0.3}, 0.05)).epsilon(1e-12));
  CHECK(tau == doctest::Approx(bisection_tau({0, 0}, 0.5, {-0.4, 0.3}, 0.05)).epsilon(1e-9));
  // the meeting point really is ve*tau away
  CHECK(std::hypot(-0.4 + 0.05 * tau, 0.3) == doctest::Approx(0.5 * tau).epsilon(1e-12));
}

TEST_CASE("pursuit time over random geometry") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(-2.0, 2.0), vb(0.0, 0.2), ve(0.25, 1.0);
  for (int i = 0; i < 500; ++i) {
    const Vec2 ee{pos(rng), pos(rng)}, ob{pos(rng), pos(rng)};
    const double b = vb(rng), e = ve(rng);
    const double tau = pursuit_time(ee, e, ob, b);
    REQUIRE(tau >= 0.0);
    CHECK(tau == doctest::Approx(bisection_tau(ee, e, ob, b)).epsilon(1e-9));
  }
}

TEST_CASE("pursuit time rejects a slower pursuer") {
  CHECK_THROWS_AS(pursuit_time({0, 0}, 0.04, {1, 0}, 0.05), std::invalid_argument);
}

TEST_CASE("disk overlap inside the strip") {
  // 2.0 m apart, reach 0.8: cannot touch
  CHECK_FALSE(disks_overlap_in_strip({0.5, -0.6}, 0.8, {2.5, 0.6}, 0.8, 0.3));
  // 1.30 m apart with 1.6 m of combined reach
  CHECK(disks_overlap_in_strip({0.5, -0.6}, 0.8, {1.0, 0.6}, 0.8, 0.3));
  // disks overlap only outside the strip
  CHECK_FALSE(disks_overlap_in_strip({0.0, 2.0}, 1.0, {1.5, 2.0}, 1.0, 0.3));
}

TEST_CASE("reward values") {
  CHECK(reward_of(0, 1, 1, 0.01) == 0.5);
  CHECK(reward_of(100, 0.9, 0.8, 0.01) == doctest::Approx(0.72 * sigmoid(1.0)).epsilon(1e-12));
  CHECK(std::abs(reward_of(100, 0.9, 0.8, 0.01) - 0.5264) < 5e-5);
  for (double a : {0.0, 5.0, 1e4}) CHECK(reward_of(a, 0.0, 0.7, 0.3) == 0.0);
}

TEST_CASE("reward is bounded and rejects bad inputs") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> area(0, 1e4), p(0, 1), k(0, 1);
  for (int i = 0; i < 10000; ++i) {
    const double r = reward_of(area(rng), p(rng), p(rng), k(rng));
    REQUIRE(r >= 0.0);
    REQUIRE(r <= 1.0);
  }
  CHECK_THROWS_AS(reward_of(-1, 0.5, 0.5), RewardDomainError);
  CHECK_THROWS_AS(reward_of(10, 1.2, 0.5), RewardDomainError);
  CHECK_THROWS_AS(reward_of(10, 0.5, -0.1), RewardDomainError);
}
