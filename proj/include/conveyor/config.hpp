#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "conveyor/geometry.hpp"

namespace conveyor {

struct RobotSpec {
  Vec2 base;
  double reach = 0.8;      // m
  double ee_speed = 0.5;   // m/s
  Vec2 rest_point;         // resting pose, also the drop-off bin
};

/// Everything the simulator needs besides the pattern. Units are SI except
/// object areas, which are cm^2 (see reward_k).
struct WorldConfig {
  double belt_length = 5.0;
  double belt_width = 0.6;
  double belt_speed = 0.078;
  double tick_rate = 10.0;
  std::vector<RobotSpec> robots;
  std::size_t action_slots = 10;
  double grasp_dwell = 0.5;
  double drop_dwell = 0.5;
  double terminal_bonus = 1.0;
  double terminal_rate_weight = 10.0;
  double reward_k = 0.01;  // 1/cm^2
  std::uint64_t rng_seed = 0;

  double dt() const { return 1.0 / tick_rate; }
  double half_width() const { return 0.5 * belt_width; }
};

enum class ConfigErrorKind {
  bad_value,
  overlapping_workspaces,
  ee_slower_than_belt,
  non_alternating_sides,
  rest_out_of_reach,
};

struct ConfigError {
  ConfigErrorKind kind;
  std::string message;  // names the offending robot index or pair
};

std::string to_string(ConfigErrorKind kind);

/// Every violated invariant, in a stable order. Empty means valid.
std::vector<ConfigError> validate_config(const WorldConfig& cfg);

class InvalidConfig : public std::runtime_error {
 public:
  explicit InvalidConfig(std::vector<ConfigError> errors);
  const std::vector<ConfigError>& errors() const { return errors_; }

 private:
  std::vector<ConfigError> errors_;
};

/// Returns cfg unchanged, or throws InvalidConfig listing all violations.
const WorldConfig& validated(const WorldConfig& cfg);

/// Standard layout: robots alternating sides (first on -y), bases 0.15 m
/// off the belt edge, 1.6 m apart along the belt, rest point (drop bin)
/// 0.45 m downstream and 0.2 m outward of the base,
/// belt ending 1 m past the last base.
WorldConfig default_config(std::size_t n_robots = 2, double belt_speed = 0.078);

WorldConfig load_config(const std::filesystem::path& path);
void save_config(const WorldConfig& cfg, const std::filesystem::path& path);
std::string config_to_json(const WorldConfig& cfg);
WorldConfig config_from_json(const std::string& text);

}  // namespace conveyor
