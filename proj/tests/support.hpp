#pragma once
// Shared fixtures and independent oracles for the test binaries.

#include <cmath>
#include <optional>
#include <random>
#include <string>

#include "conveyor/config.hpp"
#include "conveyor/patterns.hpp"

namespace testing_support {

using conveyor::Pattern;
using conveyor::PatternObject;
using conveyor::RobotSpec;
using conveyor::Vec2;
using conveyor::WorldConfig;

inline RobotSpec robot_at(double x, double y, double reach = 0.8, double ee_speed = 0.5) {
  RobotSpec r;
  r.base = {x, y};
  r.reach = reach;
  r.ee_speed = ee_speed;
  r.rest_point = r.base;
  return r;
}

inline WorldConfig one_robot_config(double belt_speed = 0.05, double belt_length = 3.0) {
  WorldConfig cfg;
  cfg.belt_speed = belt_speed;
  cfg.belt_length = belt_length;
  cfg.robots = {robot_at(1.0, -0.45)};
  return cfg;
}

inline PatternObject obj(std::uint32_t id, double x, double y, double area = 100.0, double pd = 0.9,
                         double pg = 0.8) {
  return {id, x, y, area, pd, pg};
}

inline Pattern pattern_of(std::initializer_list<PatternObject> objs) {
  Pattern p;
  p.objects = objs;
  return p;
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Pursuit time by textbook quadratic formula (no cancellation tricks).
inline double quadratic_tau(Vec2 ee, double ve, Vec2 obj, double vb) {
  const double dx = obj.x - ee.x, dy = obj.y - ee.y;
  const double a = vb * vb - ve * ve;
  const double b = 2 * dx * vb;
  const double c = dx * dx + dy * dy;
  const double disc = b * b - 4 * a * c;
  const double r1 = (-b + std::sqrt(disc)) / (2 * a);
  const double r2 = (-b - std::sqrt(disc)) / (2 * a);
  return std::max(r1, r2);
}

// Pursuit time by bisection on the distance gap |obj(t) - ee| - ve t.
inline double bisection_tau(Vec2 ee, double ve, Vec2 obj, double vb) {
  auto gap = [&](double t) { return std::hypot(obj.x + vb * t - ee.x, obj.y - ee.y) - ve * t; };
  double lo = 0, hi = 1;
  while (gap(hi) > 0) hi *= 2;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct OracleIntercept {
  double decision_time;
  double intercept_time;
};

// First tick at which a lone object becomes pickable for an idle robot
// resting at its rest point, and the resulting intercept time.
inline std::optional<OracleIntercept> lone_object_intercept(const WorldConfig& cfg, const PatternObject& o,
                                                            std::int64_t max_ticks = 100000) {
  const auto& r = cfg.robots.at(0);
  for (std::int64_t k = 0; k <= max_ticks; ++k) {
    const double t = static_cast<double>(k) / cfg.tick_rate;
    const Vec2 p{-o.x + cfg.belt_speed * t, o.y};
    if (p.x > cfg.belt_length) return std::nullopt;
    if (p.x < 0) continue;
    const double tau = quadratic_tau(r.rest_point, r.ee_speed, p, cfg.belt_speed);
    const Vec2 m{p.x + cfg.belt_speed * tau, p.y};
    const bool reach = std::hypot(m.x - r.base.x, m.y - r.base.y) <= r.reach;
    const bool strip = std::abs(m.y) <= cfg.belt_width / 2 && m.x >= 0 && m.x <= cfg.belt_length;
    if (reach && strip) return OracleIntercept{t, t + tau};
  }
  return std::nullopt;
}

}  // namespace testing_support
