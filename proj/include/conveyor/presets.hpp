#pragma once

#include <string>
#include <vector>

#include "conveyor/patterns.hpp"

namespace conveyor {

inline constexpr double kDefaultRegionLength = 1.5;
inline constexpr double kNominalBeltSpeed = 0.05;   // m/s, robustness study
inline constexpr double kOverloadBeltSpeed = 0.14;  // m/s, dense grid overload

struct NamedSpec {
  std::string id;     // short identifier, e.g. "grid-0.15"
  std::string label;  // table row label, e.g. "Grid s=0.15"
  PatternSpec spec;
};

/// The four evaluation distributions: grid s = 0.15 and 0.3, Poisson r = 0.2
/// and 0.3 (the Poisson parameter is the disk radius).
std::vector<NamedSpec> paper4_preset(std::uint64_t seed = 0, double region_length = kDefaultRegionLength);

/// Balanced Poisson + grid mix with r, s spread evenly over [lo, hi].
std::vector<PatternSpec> mixed_specs(std::size_t per_kind = 6, double lo = 0.15, double hi = 0.4,
                                     double region_length = kDefaultRegionLength);

/// Dense grid (s = 0.15) used with kOverloadBeltSpeed.
std::vector<NamedSpec> overload_preset(std::uint64_t seed = 0, double region_length = kDefaultRegionLength);

/// Named preset lookup: "paper-4", "mixed" or "overload". Throws PatternError.
std::vector<NamedSpec> preset(const std::string& name, std::uint64_t seed = 0);

}  // namespace conveyor
