#include "conveyor/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace conveyor {

double pursuit_time(Vec2 pursuer, double pursuer_speed, Vec2 target, double drift_speed) {
  if (!(pursuer_speed > drift_speed)) {
    throw std::invalid_argument("pursuit_time: pursuer must be faster than the drift");
  }
  // (dx + vb*t)^2 + dy^2 = ve^2 t^2  ->  a t^2 + b t + c = 0 with a < 0, c >= 0.
  const double dx = target.x - pursuer.x;
  const double dy = target.y - pursuer.y;
  const double a = drift_speed * drift_speed - pursuer_speed * pursuer_speed;
  const double b = 2.0 * dx * drift_speed;
  const double c = dx * dx + dy * dy;
  if (c == 0.0) return 0.0;
  const double sq = std::sqrt(b * b - 4.0 * a * c);
  // Pick the cancellation-free form of the positive root.
  if (b >= 0.0) return (b + sq) / (-2.0 * a);
  return 2.0 * c / (sq - b);
}

namespace {

// Width of the overlap of the two horizontal chords at height y; negative
// when they do not overlap. Concave in y wherever both chords exist.
double chord_overlap(Vec2 c1, double r1, Vec2 c2, double r2, double y) {
  const double h1 = std::sqrt(std::max(0.0, r1 * r1 - (y - c1.y) * (y - c1.y)));
  const double h2 = std::sqrt(std::max(0.0, r2 * r2 - (y - c2.y) * (y - c2.y)));
  return std::min(c1.x + h1, c2.x + h2) - std::max(c1.x - h1, c2.x - h2);
}

}  // namespace

bool disks_overlap_in_strip(Vec2 c1, double r1, Vec2 c2, double r2, double half_width) {
  double lo = std::max({-half_width, c1.y - r1, c2.y - r2});
  double hi = std::min({half_width, c1.y + r1, c2.y + r2});
  if (lo >= hi) return false;
  // Golden-section search for the widest overlap.
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double m1 = b - g * (b - a), m2 = a + g * (b - a);
  double f1 = chord_overlap(c1, r1, c2, r2, m1), f2 = chord_overlap(c1, r1, c2, r2, m2);
  for (int i = 0; i < 200 && b - a > 1e-12; ++i) {
    if (f1 < f2) {
      a = m1; m1 = m2; f1 = f2;
      m2 = a + g * (b - a);
      f2 = chord_overlap(c1, r1, c2, r2, m2);
    } else {
      b = m2; m2 = m1; f2 = f1;
      m1 = b - g * (b - a);
      f1 = chord_overlap(c1, r1, c2, r2, m1);
    }
  }
  const double best = std::max({f1, f2, chord_overlap(c1, r1, c2, r2, lo),
                                chord_overlap(c1, r1, c2, r2, hi)});
  return best > 1e-9;
}

}  // namespace conveyor
