#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "conveyor/config.hpp"
#include "conveyor/geometry.hpp"
#include "conveyor/patterns.hpp"

namespace conveyor {

using ObjectId = std::uint32_t;

enum class ObjectState { on_belt, targeted, picked, missed };

std::string to_string(ObjectState s);

struct WasteObject {
  ObjectId id = 0;
  double x = 0.0;          // current belt coordinate
  double y = 0.0;
  double x_start = 0.0;    // belt coordinate at t = 0
  double area_cm2 = 0.0;
  double p_detection = 1.0;
  double p_grasp = 1.0;
  double reward = 0.0;     // cached reward_of(area, p_det, p_grasp, k)
  ObjectState state = ObjectState::on_belt;

  Vec2 position() const { return {x, y}; }
};

/// Meeting point of an end-effector and a belt object.
struct Intercept {
  double tau = 0.0;        // travel time from t0
  double time = 0.0;       // absolute, t0 + tau
  Vec2 point;
  bool within_reach = false;
  bool on_belt = false;    // inside the strip and before the belt end
  bool feasible() const { return within_reach && on_belt; }
};

/// Solves the pursuit quadratic for the end-effector at `ee_pos` chasing
/// the object at `obj_pos` at time t0. Always returns the geometry; check
/// feasible() for reachability.
Intercept solve_intercept(const RobotSpec& robot, Vec2 ee_pos, Vec2 obj_pos, double t0, const WorldConfig& cfg);

/// Feasible intercept of an on-belt object, or nullopt.
std::optional<Intercept> intercept(const RobotSpec& robot, Vec2 ee_pos, const WasteObject& obj, double t0,
                                   const WorldConfig& cfg);

struct PnPTask {
  std::size_t robot = 0;
  ObjectId object_id = 0;
  double decision_time = 0.0;
  Vec2 ee_start;
  Vec2 intercept_point;
  double intercept_time = 0.0;
  double carry_end_time = 0.0;
  double t_process = 0.0;
  bool grasped = false;
};

/// t_process = travel + grasp dwell + carry back to the rest point + drop dwell.
double processing_time(const Intercept& icp, const RobotSpec& robot, const WorldConfig& cfg);

struct CandidateFeature {
  ObjectId object_id = 0;
  double x_rel = 0.0;
  double y_rel = 0.0;
  double t_process = 0.0;
  double reward = 0.0;
};

struct RobotStatus {
  bool busy = false;
  double t_available = 0.0;  // seconds until idle again, 0 when idle
};

struct DecisionRequest {
  std::size_t robot = 0;
  double sim_time = 0.0;
  Vec2 base;                                // deciding robot's base
  std::vector<CandidateFeature> candidates;  // descending x, at most action_slots
  std::vector<RobotStatus> robot_status;     // every robot, by index
};

struct EpisodeStats {
  std::size_t n_total = 0;
  std::size_t n_picked = 0;
  std::size_t n_missed = 0;
  double completion_time = 0.0;
  double picks_per_minute = 0.0;
  double reward_weighted_rate = 1.0;
  double total_return = 0.0;

  double picked_fraction() const {
    return n_total == 0 ? 1.0 : static_cast<double>(n_picked) / static_cast<double>(n_total);
  }
  friend bool operator==(const EpisodeStats&, const EpisodeStats&) = default;
};

/// Flat JSON object with the fields above, in declaration order.
std::string stats_to_json(const EpisodeStats& s);
EpisodeStats stats_from_json(const std::string& text);

struct RewardEmission {
  std::int64_t tick = 0;
  double time = 0.0;
  double amount = 0.0;
  std::optional<ObjectId> object;  // nullopt for terminal rewards
};

struct StepEvents {
  std::vector<ObjectId> picked;
  std::vector<ObjectId> missed;
  double reward = 0.0;
  bool done = false;
};

enum class SimErrorKind { step_after_done, robot_busy, not_a_candidate, bad_robot, bad_pattern };

class SimError : public std::runtime_error {
 public:
  SimError(SimErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  SimErrorKind kind() const { return kind_; }

 private:
  SimErrorKind kind_;
};

/// JSON-lines event log; one `{"tick","kind","payload"}` object per line.
class EventLog {
 public:
  explicit EventLog(bool enabled = true) : enabled_(enabled) {}
  bool enabled() const { return enabled_; }
  void append(std::string line) { if (enabled_) lines_.push_back(std::move(line)); }
  const std::vector<std::string>& lines() const { return lines_; }
  std::string to_jsonl() const;

 private:
  bool enabled_;
  std::vector<std::string> lines_;
};

/// Discrete-time conveyor world. Mutated only by step() and commit_pick().
class World {
 public:
  World(const WorldConfig& cfg, const Pattern& pattern, bool log_events = true);

  const WorldConfig& config() const { return cfg_; }
  std::int64_t tick() const { return tick_; }
  double sim_time() const { return time_at(tick_); }
  bool done() const { return done_; }
  std::span<const WasteObject> objects() const { return objects_; }
  const WasteObject& object(ObjectId id) const;
  std::size_t n_robots() const { return cfg_.robots.size(); }
  bool robot_idle(std::size_t robot) const;
  const std::optional<PnPTask>& task(std::size_t robot) const { return tasks_.at(robot); }
  Vec2 ee_position(std::size_t robot) const;
  RobotStatus robot_status(std::size_t robot) const;

  std::optional<DecisionRequest> build_decision_request(std::size_t robot) const;
  PnPTask commit_pick(std::size_t robot, ObjectId object_id);
  StepEvents step();

  EpisodeStats stats() const;
  double total_return() const { return total_return_; }
  const std::vector<RewardEmission>& rewards() const { return rewards_; }
  const EventLog& log() const { return log_; }
  /// Records a controller decision that leaves the world untouched.
  void note_noop(std::size_t robot);

 private:
  double time_at(std::int64_t tick) const { return static_cast<double>(tick) / cfg_.tick_rate; }
  void complete_phases(StepEvents& ev);
  void mark_missed(StepEvents& ev);
  void check_done(StepEvents& ev);
  bool recoverable(const WasteObject& obj) const;
  void emit(double amount, std::optional<ObjectId> object);
  void log_event(const char* kind, const std::string& payload);
  WasteObject& object_mut(ObjectId id);

  WorldConfig cfg_;
  std::vector<WasteObject> objects_;
  std::unordered_map<ObjectId, std::size_t> index_;
  std::vector<std::optional<PnPTask>> tasks_;
  std::int64_t tick_ = 0;
  bool done_ = false;
  double completion_time_ = 0.0;
  double total_return_ = 0.0;
  std::vector<RewardEmission> rewards_;
  EventLog log_;
};

}  // namespace conveyor
