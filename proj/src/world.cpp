#include "conveyor/world.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "conveyor/reward.hpp"

namespace conveyor {

using nlohmann::ordered_json;

namespace {

constexpr double kTimeEps = 1e-9;

ordered_json point_json(Vec2 p) { return ordered_json::array({p.x, p.y}); }

}  // namespace

std::string to_string(ObjectState s) {
  switch (s) {
    case ObjectState::on_belt: return "on_belt";
    case ObjectState::targeted: return "targeted";
    case ObjectState::picked: return "picked";
    case ObjectState::missed: return "missed";
  }
  return "unknown";
}

std::string EventLog::to_jsonl() const {
  std::string out;
  for (const auto& l : lines_) {
    out += l;
    out += '\n';
  }
  return out;
}

Intercept solve_intercept(const RobotSpec& robot, Vec2 ee_pos, Vec2 obj_pos, double t0, const WorldConfig& cfg) {
  Intercept icp;
  icp.tau = pursuit_time(ee_pos, robot.ee_speed, obj_pos, cfg.belt_speed);
  icp.time = t0 + icp.tau;
  icp.point = {obj_pos.x + cfg.belt_speed * icp.tau, obj_pos.y};
  icp.within_reach = distance(icp.point, robot.base) <= robot.reach;
  icp.on_belt = std::abs(icp.point.y) <= cfg.half_width() && icp.point.x >= 0.0 &&
                icp.point.x <= cfg.belt_length;
  return icp;
}

std::optional<Intercept> intercept(const RobotSpec& robot, Vec2 ee_pos, const WasteObject& obj, double t0,
                                   const WorldConfig& cfg) {
  if (obj.state != ObjectState::on_belt) return std::nullopt;
  auto icp = solve_intercept(robot, ee_pos, obj.position(), t0, cfg);
  if (!icp.feasible()) return std::nullopt;
  return icp;
}

double processing_time(const Intercept& icp, const RobotSpec& robot, const WorldConfig& cfg) {
  return icp.tau + cfg.grasp_dwell + distance(icp.point, robot.rest_point) / robot.ee_speed + cfg.drop_dwell;
}

World::World(const WorldConfig& cfg, const Pattern& pattern, bool log_events)
    : cfg_(validated(cfg)), tasks_(cfg.robots.size()), log_(log_events) {
  objects_.reserve(pattern.objects.size());
  for (const auto& po : pattern.objects) {
    if (std::abs(po.y) > cfg_.half_width())
      throw SimError(SimErrorKind::bad_pattern, "object " + std::to_string(po.id) + " lies outside the belt strip");
    WasteObject o;
    o.id = po.id;
    o.x_start = -po.x;
    o.x = o.x_start;
    o.y = po.y;
    o.area_cm2 = po.area_cm2;
    o.p_detection = po.p_detection;
    o.p_grasp = po.p_grasp;
    o.reward = reward_of(po.area_cm2, po.p_detection, po.p_grasp, cfg_.reward_k);
    if (!index_.emplace(o.id, objects_.size()).second)
      throw SimError(SimErrorKind::bad_pattern, "duplicate object id " + std::to_string(o.id));
    objects_.push_back(o);
  }
  if (log_.enabled()) {
    ordered_json p;
    p["n_objects"] = objects_.size();
    p["n_robots"] = cfg_.robots.size();
    p["belt_speed"] = cfg_.belt_speed;
    p["tick_rate"] = cfg_.tick_rate;
    p["terminal_bonus"] = cfg_.terminal_bonus;
    p["terminal_rate_weight"] = cfg_.terminal_rate_weight;
    p["rng_seed"] = cfg_.rng_seed;
    log_event("start", p.dump());
  }
}

const WasteObject& World::object(ObjectId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw SimError(SimErrorKind::not_a_candidate, "unknown object " + std::to_string(id));
  return objects_[it->second];
}

WasteObject& World::object_mut(ObjectId id) {
  return const_cast<WasteObject&>(std::as_const(*this).object(id));
}

bool World::robot_idle(std::size_t robot) const {
  if (robot >= tasks_.size()) throw SimError(SimErrorKind::bad_robot, "no robot " + std::to_string(robot));
  return !tasks_[robot].has_value();
}

Vec2 World::ee_position(std::size_t robot) const {
  const auto& spec = cfg_.robots.at(robot);
  const auto& task = tasks_.at(robot);
  if (!task) return spec.rest_point;
  const double t = sim_time();
  const double grasp_end = task->intercept_time + cfg_.grasp_dwell;
  const double carry_time = distance(task->intercept_point, spec.rest_point) / spec.ee_speed;
  if (t < task->intercept_time) {
    const double span = task->intercept_time - task->decision_time;
    const double f = span > 0 ? (t - task->decision_time) / span : 1.0;
    return task->ee_start + f * (task->intercept_point - task->ee_start);
  }
  if (t < grasp_end) return task->intercept_point;
  if (t < grasp_end + carry_time) {
    const double f = (t - grasp_end) / carry_time;
    return task->intercept_point + f * (spec.rest_point - task->intercept_point);
  }
  return spec.rest_point;
}

RobotStatus World::robot_status(std::size_t robot) const {
  const auto& task = tasks_.at(robot);
  if (!task) return {};
  return {true, std::max(0.0, task->carry_end_time - sim_time())};
}

std::optional<DecisionRequest> World::build_decision_request(std::size_t robot) const {
  if (done_ || !robot_idle(robot)) return std::nullopt;
  const auto& spec = cfg_.robots[robot];
  const Vec2 ee = ee_position(robot);
  const double now = sim_time();

  struct Entry {
    const WasteObject* obj;
    Intercept icp;
  };
  std::vector<Entry> feasible;
  for (const auto& o : objects_) {
    if (o.state != ObjectState::on_belt || o.x < 0.0) continue;
    if (auto icp = intercept(spec, ee, o, now, cfg_)) feasible.push_back({&o, *icp});
  }
  if (feasible.empty()) return std::nullopt;
  std::sort(feasible.begin(), feasible.end(), [](const Entry& a, const Entry& b) {
    if (a.obj->x != b.obj->x) return a.obj->x > b.obj->x;
    return a.obj->id < b.obj->id;
  });
  if (feasible.size() > cfg_.action_slots) feasible.resize(cfg_.action_slots);

  DecisionRequest req;
  req.robot = robot;
  req.sim_time = now;
  req.base = spec.base;
  req.candidates.reserve(feasible.size());
  for (const auto& e : feasible) {
    req.candidates.push_back({e.obj->id, e.obj->x - spec.base.x, e.obj->y - spec.base.y,
                              processing_time(e.icp, spec, cfg_), e.obj->reward});
  }
  req.robot_status.reserve(n_robots());
  for (std::size_t i = 0; i < n_robots(); ++i) req.robot_status.push_back(robot_status(i));
  return req;
}

PnPTask World::commit_pick(std::size_t robot, ObjectId object_id) {
  if (done_) throw SimError(SimErrorKind::step_after_done, "commit after episode end");
  if (!robot_idle(robot)) throw SimError(SimErrorKind::robot_busy, "robot " + std::to_string(robot) + " is busy");
  const auto req = build_decision_request(robot);
  const bool listed = req && std::any_of(req->candidates.begin(), req->candidates.end(),
                                         [&](const CandidateFeature& c) { return c.object_id == object_id; });
  if (!listed)
    throw SimError(SimErrorKind::not_a_candidate,
                   "object " + std::to_string(object_id) + " is not a candidate of robot " + std::to_string(robot));

  const auto& spec = cfg_.robots[robot];
  auto& obj = object_mut(object_id);
  const double now = sim_time();
  const Vec2 ee = ee_position(robot);
  const Intercept icp = *intercept(spec, ee, obj, now, cfg_);

  PnPTask task;
  task.robot = robot;
  task.object_id = object_id;
  task.decision_time = now;
  task.ee_start = ee;
  task.intercept_point = icp.point;
  task.intercept_time = icp.time;
  task.t_process = processing_time(icp, spec, cfg_);
  task.carry_end_time = now + task.t_process;
  obj.state = ObjectState::targeted;
  tasks_[robot] = task;

  if (log_.enabled()) {
    ordered_json p;
    p["robot"] = robot;
    p["object"] = object_id;
    p["decision_time"] = now;
    p["ee_start"] = point_json(ee);
    p["intercept_point"] = point_json(icp.point);
    p["intercept_time"] = icp.time;
    p["t_process"] = task.t_process;
    log_event("commit", p.dump());
  }

  if (task.intercept_time <= now + kTimeEps) {
    StepEvents ev;
    complete_phases(ev);
    check_done(ev);
  }
  return task;
}

void World::note_noop(std::size_t robot) {
  if (log_.enabled()) {
    ordered_json p;
    p["robot"] = robot;
    log_event("noop", p.dump());
  }
}

StepEvents World::step() {
  if (done_) throw SimError(SimErrorKind::step_after_done, "step after episode end");
  StepEvents ev;
  const double before = total_return_;
  ++tick_;
  const double now = sim_time();
  for (auto& o : objects_) {
    if (o.state != ObjectState::picked) o.x = o.x_start + cfg_.belt_speed * now;
  }
  complete_phases(ev);
  mark_missed(ev);
  check_done(ev);
  ev.reward = total_return_ - before;
  ev.done = done_;
  return ev;
}

void World::complete_phases(StepEvents& ev) {
  const double now = sim_time();
  for (std::size_t r = 0; r < tasks_.size(); ++r) {
    auto& task = tasks_[r];
    if (!task) continue;
    if (!task->grasped && now + kTimeEps >= task->intercept_time) {
      task->grasped = true;
      auto& obj = object_mut(task->object_id);
      if (log_.enabled()) {
        ordered_json p;
        p["robot"] = r;
        p["object"] = obj.id;
        p["object_x"] = obj.x;
        p["intercept_time"] = task->intercept_time;
        p["reward"] = obj.reward;
        log_event("pick", p.dump());
      }
      obj.state = ObjectState::picked;
      obj.x = task->intercept_point.x;
      ev.picked.push_back(obj.id);
      emit(obj.reward, obj.id);
    }
    if (task->grasped && now + kTimeEps >= task->carry_end_time) {
      if (log_.enabled()) {
        ordered_json p;
        p["robot"] = r;
        log_event("idle", p.dump());
      }
      task.reset();
    }
  }
}

bool World::recoverable(const WasteObject& obj) const {
  if (obj.x > cfg_.belt_length) return false;
  for (const auto& spec : cfg_.robots) {
    const auto icp = solve_intercept(spec, spec.rest_point, obj.position(), sim_time(), cfg_);
    if (icp.feasible()) return true;
    // Meeting point still upstream of the base: the object has not reached
    // this robot's extended workspace yet.
    if (icp.point.x < spec.base.x) return true;
  }
  return false;
}

void World::mark_missed(StepEvents& ev) {
  for (auto& o : objects_) {
    if (o.state != ObjectState::on_belt || recoverable(o)) continue;
    o.state = ObjectState::missed;
    ev.missed.push_back(o.id);
    if (log_.enabled()) {
      ordered_json p;
      p["object"] = o.id;
      p["x"] = o.x;
      log_event("missed", p.dump());
    }
  }
}

void World::check_done(StepEvents& ev) {
  if (done_) return;
  // Done once everything is picked, or the last unpicked object has left
  // the belt.
  const double end = cfg_.belt_length;
  const bool open = std::any_of(objects_.begin(), objects_.end(), [end](const WasteObject& o) {
    return o.state == ObjectState::on_belt || o.state == ObjectState::targeted ||
           (o.state == ObjectState::missed && o.x <= end);
  });
  if (open) return;
  done_ = true;
  completion_time_ = sim_time();
  const auto s = stats();
  const double terminal = cfg_.terminal_bonus + cfg_.terminal_rate_weight * s.reward_weighted_rate;
  emit(terminal, std::nullopt);
  ev.done = true;
  if (log_.enabled()) {
    ordered_json p;
    p["n_total"] = s.n_total;
    p["n_picked"] = s.n_picked;
    p["n_missed"] = s.n_missed;
    p["completion_time"] = completion_time_;
    p["reward_weighted_rate"] = s.reward_weighted_rate;
    p["terminal_reward"] = terminal;
    p["total_return"] = total_return_;
    log_event("done", p.dump());
  }
}

void World::emit(double amount, std::optional<ObjectId> object) {
  rewards_.push_back({tick_, sim_time(), amount, object});
  total_return_ += amount;
}

void World::log_event(const char* kind, const std::string& payload) {
  std::string line = "{\"tick\":" + std::to_string(tick_) + ",\"kind\":\"" + kind + "\",\"payload\":" + payload + "}";
  log_.append(std::move(line));
}

EpisodeStats World::stats() const {
  EpisodeStats s;
  s.n_total = objects_.size();
  double all = 0.0, got = 0.0;
  for (const auto& o : objects_) {
    all += o.reward;
    if (o.state == ObjectState::picked) {
      ++s.n_picked;
      got += o.reward;
    } else if (o.state == ObjectState::missed) {
      ++s.n_missed;
    }
  }
  s.completion_time = done_ ? completion_time_ : sim_time();
  s.picks_per_minute = s.completion_time > 0 ? 60.0 * static_cast<double>(s.n_picked) / s.completion_time : 0.0;
  s.reward_weighted_rate = (all <= 0.0 || (done_ && s.n_missed == 0)) ? 1.0 : got / all;
  s.total_return = total_return_;
  return s;
}

}  // namespace conveyor

namespace conveyor {

std::string stats_to_json(const EpisodeStats& s) {
  ordered_json j;
  j["n_total"] = s.n_total;
  j["n_picked"] = s.n_picked;
  j["n_missed"] = s.n_missed;
  j["completion_time"] = s.completion_time;
  j["picks_per_minute"] = s.picks_per_minute;
  j["reward_weighted_rate"] = s.reward_weighted_rate;
  j["total_return"] = s.total_return;
  return j.dump();
}

EpisodeStats stats_from_json(const std::string& text) {
  const auto j = ordered_json::parse(text);
  EpisodeStats s;
  s.n_total = j.at("n_total").get<std::size_t>();
  s.n_picked = j.at("n_picked").get<std::size_t>();
  s.n_missed = j.at("n_missed").get<std::size_t>();
  s.completion_time = j.at("completion_time").get<double>();
  s.picks_per_minute = j.at("picks_per_minute").get<double>();
  s.reward_weighted_rate = j.at("reward_weighted_rate").get<double>();
  s.total_return = j.at("total_return").get<double>();
  return s;
}

}  // namespace conveyor
