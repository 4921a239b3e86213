#include "conveyor/episode.hpp"

namespace conveyor {

Episode::Episode(const WorldConfig& cfg, const Pattern& pattern, bool log_events)
    : world_(cfg, pattern, log_events) {}

const std::optional<DecisionRequest>& Episode::next_decision() {
  if (pending_) return pending_;
  while (!world_.done()) {
    for (; cursor_ < world_.n_robots(); ++cursor_) {
      if (!world_.robot_idle(cursor_)) continue;
      if (auto req = world_.build_decision_request(cursor_)) {
        pending_ = std::move(req);
        return pending_;
      }
    }
    world_.step();
    cursor_ = 0;
  }
  return pending_;
}

void Episode::resolve(std::optional<std::size_t> choice) {
  if (!pending_) throw SimError(SimErrorKind::step_after_done, "no pending decision");
  const DecisionRequest req = std::move(*pending_);
  pending_.reset();
  ++cursor_;
  if (choice && *choice < req.candidates.size()) {
    world_.commit_pick(req.robot, req.candidates[*choice].object_id);
  } else {
    world_.note_noop(req.robot);
  }
}

double Episode::take_reward() {
  double sum = 0.0;
  const auto& rs = world_.rewards();
  for (; reward_cursor_ < rs.size(); ++reward_cursor_) sum += rs[reward_cursor_].amount;
  return sum;
}

EpisodeResult run_episode(const WorldConfig& cfg, const Pattern& pattern, const Controller& controller,
                          bool log_events) {
  Episode ep(cfg, pattern, log_events);
  EpisodeResult result;
  while (const auto& req = ep.next_decision()) {
    ++result.decisions;
    ep.resolve(controller(*req));
  }
  result.stats = ep.world().stats();
  result.log = ep.world().log();
  return result;
}

}  // namespace conveyor
