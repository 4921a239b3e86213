#pragma once

#include <functional>
#include <optional>

#include "conveyor/world.hpp"

namespace conveyor {

/// Maps a decision request to a candidate index, or nullopt to let the
/// robot wait one tick.
using Controller = std::function<std::optional<std::size_t>(const DecisionRequest&)>;

/// Decision-point driver shared by run_episode and the env bridge. Idle
/// robots are polled in ascending index within a tick; once every robot has
/// been offered its decision the world advances one tick.
class Episode {
 public:
  Episode(const WorldConfig& cfg, const Pattern& pattern, bool log_events = true);

  /// Pending decision, advancing ticks as needed. nullopt once done.
  const std::optional<DecisionRequest>& next_decision();

  /// Resolves the pending decision: an index into its candidates commits
  /// that pick, nullopt is a no-op for this tick.
  void resolve(std::optional<std::size_t> choice);

  bool done() const { return world_.done(); }
  const World& world() const { return world_; }

  /// Reward accrued since the previous call.
  double take_reward();

 private:
  World world_;
  std::size_t cursor_ = 0;
  std::optional<DecisionRequest> pending_;
  std::size_t reward_cursor_ = 0;
};

struct EpisodeResult {
  EpisodeStats stats;
  EventLog log;
  std::size_t decisions = 0;
};

/// Runs an episode to completion. Deterministic for deterministic
/// controllers. Controller exceptions propagate.
EpisodeResult run_episode(const WorldConfig& cfg, const Pattern& pattern, const Controller& controller,
                          bool log_events = true);

}  // namespace conveyor
