#include "conveyor/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace conveyor {

using nlohmann::ordered_json;

std::string to_string(ConfigErrorKind kind) {
  switch (kind) {
    case ConfigErrorKind::bad_value: return "bad-value";
    case ConfigErrorKind::overlapping_workspaces: return "overlapping-workspaces";
    case ConfigErrorKind::ee_slower_than_belt: return "ee-slower-than-belt";
    case ConfigErrorKind::non_alternating_sides: return "non-alternating-sides";
    case ConfigErrorKind::rest_out_of_reach: return "rest-out-of-reach";
  }
  return "unknown";
}

std::vector<ConfigError> validate_config(const WorldConfig& cfg) {
  std::vector<ConfigError> errors;
  auto bad = [&](ConfigErrorKind kind, std::string msg) { errors.push_back({kind, std::move(msg)}); };

  if (!(cfg.belt_speed > 0)) bad(ConfigErrorKind::bad_value, "belt_speed must be > 0");
  if (!(cfg.tick_rate > 0)) bad(ConfigErrorKind::bad_value, "tick_rate must be > 0");
  if (!(cfg.belt_length > 0)) bad(ConfigErrorKind::bad_value, "belt_length must be > 0");
  if (!(cfg.belt_width > 0)) bad(ConfigErrorKind::bad_value, "belt_width must be > 0");
  if (cfg.action_slots < 1) bad(ConfigErrorKind::bad_value, "action_slots must be >= 1");
  if (!(cfg.grasp_dwell >= 0) || !(cfg.drop_dwell >= 0))
    bad(ConfigErrorKind::bad_value, "dwell times must be >= 0");
  if (!(cfg.reward_k >= 0)) bad(ConfigErrorKind::bad_value, "reward_k must be >= 0");
  if (cfg.robots.empty()) bad(ConfigErrorKind::bad_value, "at least one robot is required");

  for (std::size_t i = 0; i < cfg.robots.size(); ++i) {
    const auto& r = cfg.robots[i];
    const std::string name = "robot " + std::to_string(i);
    if (!(r.reach > 0)) bad(ConfigErrorKind::bad_value, name + ": reach must be > 0");
    if (!(r.ee_speed > cfg.belt_speed))
      bad(ConfigErrorKind::ee_slower_than_belt, name + ": ee_speed must exceed belt_speed");
    if (distance(r.rest_point, r.base) > r.reach)
      bad(ConfigErrorKind::rest_out_of_reach, name + ": rest_point outside reach");
  }

  for (std::size_t i = 0; i + 1 < cfg.robots.size(); ++i) {
    const auto& a = cfg.robots[i];
    const auto& b = cfg.robots[i + 1];
    const std::string pair = "robots " + std::to_string(i) + "," + std::to_string(i + 1);
    if (!(a.base.x < b.base.x))
      bad(ConfigErrorKind::non_alternating_sides, pair + ": bases not ordered along the belt");
    if (a.base.y == 0.0 || b.base.y == 0.0 || std::signbit(a.base.y) == std::signbit(b.base.y))
      bad(ConfigErrorKind::non_alternating_sides, pair + ": bases not on alternating sides");
  }
  for (std::size_t i = 0; i < cfg.robots.size(); ++i) {
    for (std::size_t j = i + 1; j < cfg.robots.size(); ++j) {
      const auto& a = cfg.robots[i];
      const auto& b = cfg.robots[j];
      if (a.reach > 0 && b.reach > 0 &&
          disks_overlap_in_strip(a.base, a.reach, b.base, b.reach, cfg.half_width())) {
        bad(ConfigErrorKind::overlapping_workspaces,
            "robots " + std::to_string(i) + "," + std::to_string(j) + ": workspaces overlap on the belt");
      }
    }
  }
  return errors;
}

namespace {

std::string join_messages(const std::vector<ConfigError>& errors) {
  std::string out = "invalid config:";
  for (const auto& e : errors) out += " [" + to_string(e.kind) + "] " + e.message + ";";
  return out;
}

}  // namespace

InvalidConfig::InvalidConfig(std::vector<ConfigError> errors)
    : std::runtime_error(join_messages(errors)), errors_(std::move(errors)) {}

const WorldConfig& validated(const WorldConfig& cfg) {
  auto errors = validate_config(cfg);
  if (!errors.empty()) throw InvalidConfig(std::move(errors));
  return cfg;
}

WorldConfig default_config(std::size_t n_robots, double belt_speed) {
  WorldConfig cfg;
  cfg.belt_speed = belt_speed;
  constexpr double standoff = 0.15;
  constexpr double first_x = 1.0;
  constexpr double pitch = 1.6;
  // Drop bin sits downstream of the base on the outer side.
  constexpr double bin_dx = 0.45;
  constexpr double bin_dy = 0.2;
  for (std::size_t i = 0; i < n_robots; ++i) {
    RobotSpec r;
    const double side = (i % 2 == 0) ? -1.0 : 1.0;
    r.base = {first_x + pitch * static_cast<double>(i), side * (cfg.half_width() + standoff)};
    r.rest_point = {r.base.x + bin_dx, r.base.y + side * bin_dy};
    cfg.robots.push_back(r);
  }
  const double last_x = n_robots == 0 ? first_x : cfg.robots.back().base.x;
  cfg.belt_length = last_x + 1.0;
  return cfg;
}

namespace {

ordered_json point_json(Vec2 p) { return ordered_json::array({p.x, p.y}); }

Vec2 point_from(const ordered_json& j) {
  if (!j.is_array() || j.size() != 2) throw std::runtime_error("config: point must be [x, y]");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

std::string config_to_json(const WorldConfig& cfg) {
  ordered_json j;
  j["belt_length"] = cfg.belt_length;
  j["belt_width"] = cfg.belt_width;
  j["belt_speed"] = cfg.belt_speed;
  j["tick_rate"] = cfg.tick_rate;
  ordered_json robots = ordered_json::array();
  for (const auto& r : cfg.robots) {
    ordered_json rj;
    rj["base"] = point_json(r.base);
    rj["reach"] = r.reach;
    rj["ee_speed"] = r.ee_speed;
    rj["rest_point"] = point_json(r.rest_point);
    robots.push_back(rj);
  }
  j["robots"] = robots;
  j["action_slots"] = cfg.action_slots;
  j["grasp_dwell"] = cfg.grasp_dwell;
  j["drop_dwell"] = cfg.drop_dwell;
  j["terminal_bonus"] = cfg.terminal_bonus;
  j["terminal_rate_weight"] = cfg.terminal_rate_weight;
  j["reward_k"] = cfg.reward_k;
  j["rng_seed"] = cfg.rng_seed;
  return j.dump(2);
}

WorldConfig config_from_json(const std::string& text) {
  const auto j = ordered_json::parse(text);
  WorldConfig cfg;
  cfg.belt_length = j.value("belt_length", cfg.belt_length);
  cfg.belt_width = j.value("belt_width", cfg.belt_width);
  cfg.belt_speed = j.value("belt_speed", cfg.belt_speed);
  cfg.tick_rate = j.value("tick_rate", cfg.tick_rate);
  cfg.action_slots = j.value("action_slots", cfg.action_slots);
  cfg.grasp_dwell = j.value("grasp_dwell", cfg.grasp_dwell);
  cfg.drop_dwell = j.value("drop_dwell", cfg.drop_dwell);
  cfg.terminal_bonus = j.value("terminal_bonus", cfg.terminal_bonus);
  cfg.terminal_rate_weight = j.value("terminal_rate_weight", cfg.terminal_rate_weight);
  cfg.reward_k = j.value("reward_k", cfg.reward_k);
  cfg.rng_seed = j.value("rng_seed", cfg.rng_seed);
  for (const auto& rj : j.at("robots")) {
    RobotSpec r;
    r.base = point_from(rj.at("base"));
    r.reach = rj.value("reach", r.reach);
    r.ee_speed = rj.value("ee_speed", r.ee_speed);
    r.rest_point = rj.contains("rest_point") ? point_from(rj.at("rest_point")) : r.base;
    cfg.robots.push_back(r);
  }
  return cfg;
}

WorldConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

void save_config(const WorldConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config " + path.string());
  out << config_to_json(cfg) << '\n';
}

}  // namespace conveyor
