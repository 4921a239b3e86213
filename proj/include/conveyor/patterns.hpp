#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace conveyor {

/// One object of a pattern. `x` is the distance behind the pattern head
/// (>= 0 for generated patterns, the head object has x = 0); at episode start
/// the object sits at belt coordinate -x, so the head is at the belt entry.
struct PatternObject {
  std::uint32_t id = 0;
  double x = 0.0;
  double y = 0.0;
  double area_cm2 = 0.0;
  double p_detection = 1.0;
  double p_grasp = 1.0;

  friend bool operator==(const PatternObject&, const PatternObject&) = default;
};

struct Pattern {
  double belt_width = 0.6;
  std::vector<PatternObject> objects;

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

enum class PatternKind { poisson_disk, grid };

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct PatternSpec {
  PatternKind kind = PatternKind::poisson_disk;
  double param = 0.2;          // min radius r (poisson) or lattice pitch s (grid), metres
  double region_length = 1.5;  // metres along the belt
  double belt_width = 0.6;
  Range area_cm2{20.0, 300.0};
  Range p_detection{0.7, 1.0};
  Range p_grasp{0.6, 1.0};
  double grid_jitter = 0.0;    // max |offset| applied to grid points, metres
  int poisson_attempts = 30;
  std::uint64_t seed = 0;
};

class PatternError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string to_string(PatternKind kind);
PatternKind pattern_kind_from(const std::string& name);

/// Throws PatternError if the spec is outside its valid domain.
void check_spec(const PatternSpec& spec);

/// Bridson dart throwing over [0, region_length] x [-w/2, w/2]; the result is
/// shifted so the smallest x is 0 and ids follow increasing x.
Pattern sample_poisson_disk(const PatternSpec& spec);

/// Lattice with pitch s along and across the belt, lanes centred on y = 0.
Pattern sample_grid(const PatternSpec& spec);

/// Dispatches on spec.kind.
Pattern sample_pattern(const PatternSpec& spec);

std::string pattern_to_json(const Pattern& p);
/// Throws PatternError on malformed JSON or schema violations.
Pattern pattern_from_json(const std::string& text);
Pattern load_pattern(const std::filesystem::path& path);
void save_pattern(const Pattern& p, const std::filesystem::path& path);

}  // namespace conveyor
