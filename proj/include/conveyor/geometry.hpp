#pragma once

#include <cmath>
#include <optional>

namespace conveyor {

/// Point or displacement in the belt frame. +x is the direction of belt
/// motion, y is across the belt with the centre line at y = 0.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Earliest non-negative time at which a pursuer leaving `pursuer` at
/// `pursuer_speed` meets a target at `target` drifting along +x at
/// `drift_speed`. Requires pursuer_speed > drift_speed, in which case
/// exactly one non-negative root exists.
double pursuit_time(Vec2 pursuer, double pursuer_speed, Vec2 target, double drift_speed);

/// True when the disks (c1, r1) and (c2, r2) share a point of positive area
/// inside the horizontal strip |y| <= half_width.
bool disks_overlap_in_strip(Vec2 c1, double r1, Vec2 c2, double r2, double half_width);

}  // namespace conveyor
