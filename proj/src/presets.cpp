#include "conveyor/presets.hpp"

#include <cstdio>

#include "conveyor/strategy.hpp"

namespace conveyor {

namespace {

NamedSpec make(PatternKind kind, double param, const char* id, const char* label, std::uint64_t seed,
               double region_length) {
  PatternSpec s;
  s.kind = kind;
  s.param = param;
  s.region_length = region_length;
  s.seed = seed;
  return {id, label, s};
}

}  // namespace

std::vector<NamedSpec> paper4_preset(std::uint64_t seed, double region_length) {
  return {
      make(PatternKind::grid, 0.15, "grid-0.15", "Grid s=0.15", derive_seed(seed, 0), region_length),
      make(PatternKind::grid, 0.3, "grid-0.3", "Grid s=0.3", derive_seed(seed, 1), region_length),
      make(PatternKind::poisson_disk, 0.2, "poisson-0.2", "Poisson r=0.2", derive_seed(seed, 2), region_length),
      make(PatternKind::poisson_disk, 0.3, "poisson-0.3", "Poisson r=0.3", derive_seed(seed, 3), region_length),
  };
}

std::vector<NamedSpec> overload_preset(std::uint64_t seed, double region_length) {
  return {make(PatternKind::grid, 0.15, "grid-0.15", "Grid s=0.15", derive_seed(seed, 0), region_length)};
}

std::vector<PatternSpec> mixed_specs(std::size_t per_kind, double lo, double hi, double region_length) {
  std::vector<PatternSpec> out;
  for (PatternKind kind : {PatternKind::poisson_disk, PatternKind::grid}) {
    for (std::size_t i = 0; i < per_kind; ++i) {
      PatternSpec s;
      s.kind = kind;
      s.param = per_kind == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(per_kind - 1);
      s.region_length = region_length;
      out.push_back(s);
    }
  }
  return out;
}

std::vector<NamedSpec> preset(const std::string& name, std::uint64_t seed) {
  if (name == "paper-4") return paper4_preset(seed);
  if (name == "overload") return overload_preset(seed);
  if (name == "mixed") {
    std::vector<NamedSpec> out;
    std::size_t i = 0;
    for (auto s : mixed_specs()) {
      char id[64];
      std::snprintf(id, sizeof id, "%s-%.3g", to_string(s.kind).c_str(), s.param);
      s.seed = derive_seed(seed, i++);
      out.push_back({id, id, s});
    }
    return out;
  }
  throw PatternError("unknown preset '" + name + "'");
}

}  // namespace conveyor
