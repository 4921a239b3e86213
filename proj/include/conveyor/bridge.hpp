#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "conveyor/episode.hpp"
#include "conveyor/patterns.hpp"

namespace conveyor {

inline constexpr int kProtocolVersion = 1;

/// 4 features per action slot, (busy, t_available) per robot, then the mask.
std::size_t obs_width(const WorldConfig& cfg);

struct Observation {
  std::vector<double> obs;   // obs_width(cfg) values, mask included at the end
  std::vector<int> mask;     // action_slots entries
  std::vector<std::optional<ObjectId>> slot_ids;
};

/// Flat encoding of a decision request. Slots follow the request order; the
/// deciding robot's status comes first, the others in ring order.
Observation encode_observation(const DecisionRequest& req, const WorldConfig& cfg);

/// All-zero observation used once the episode is done.
Observation empty_observation(const WorldConfig& cfg);

/// Pattern references accepted by reset: a registered id (sampled with the
/// reset seed), an inline pattern {"objects": [...]}, or a generator spec
/// {"kind": "grid"|"poisson_disk", "param": ..., ...}.
class PatternRegistry {
 public:
  /// Registry holding the paper-4, mixed and overload preset ids.
  static PatternRegistry with_presets();

  void add(const std::string& id, const PatternSpec& spec) { specs_[id] = spec; }
  void add(const std::string& id, const Pattern& pattern) { fixed_[id] = pattern; }
  bool contains(const std::string& id) const { return specs_.count(id) || fixed_.count(id); }

  /// Throws UnknownPattern for unregistered ids, PatternError for bad specs.
  Pattern resolve(const std::string& ref_json, std::uint64_t seed) const;

 private:
  std::map<std::string, PatternSpec> specs_;
  std::map<std::string, Pattern> fixed_;
};

class UnknownPattern : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

PatternSpec pattern_spec_from_json(const std::string& text);

/// One client session: owns at most one live episode. handle() maps a
/// request line to exactly one reply line and never throws.
class BridgeSession {
 public:
  BridgeSession(WorldConfig cfg, std::shared_ptr<const PatternRegistry> registry);

  std::string handle(const std::string& line);
  bool closed() const { return closed_; }

 private:
  std::string reset(const std::string& pattern_ref, std::uint64_t seed);
  std::string act(long long slot);
  std::string reply(double reward, bool noop);

  WorldConfig cfg_;
  std::shared_ptr<const PatternRegistry> registry_;
  std::unique_ptr<Episode> episode_;
  bool closed_ = false;
};

std::string error_reply(const std::string& code, const std::string& message = {});

}  // namespace conveyor
