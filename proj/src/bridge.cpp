#include "conveyor/bridge.hpp"

#include <json.hpp>

#include "conveyor/presets.hpp"

namespace conveyor {

using nlohmann::ordered_json;

std::size_t obs_width(const WorldConfig& cfg) {
  return 5 * cfg.action_slots + 2 * cfg.robots.size();
}

Observation encode_observation(const DecisionRequest& req, const WorldConfig& cfg) {
  const std::size_t slots = cfg.action_slots;
  const std::size_t n = cfg.robots.size();
  Observation o;
  o.obs.assign(obs_width(cfg), 0.0);
  o.mask.assign(slots, 0);
  o.slot_ids.assign(slots, std::nullopt);
  for (std::size_t k = 0; k < slots && k < req.candidates.size(); ++k) {
    const auto& c = req.candidates[k];
    o.obs[4 * k + 0] = c.x_rel;
    o.obs[4 * k + 1] = c.y_rel;
    o.obs[4 * k + 2] = c.t_process;
    o.obs[4 * k + 3] = c.reward;
    o.mask[k] = 1;
    o.slot_ids[k] = c.object_id;
  }
  for (std::size_t i = 0; i < n && i < req.robot_status.size(); ++i) {
    const auto& st = req.robot_status[(req.robot + i) % n];
    o.obs[4 * slots + 2 * i] = st.busy ? 1.0 : 0.0;
    o.obs[4 * slots + 2 * i + 1] = st.t_available;
  }
  for (std::size_t k = 0; k < slots; ++k) o.obs[4 * slots + 2 * n + k] = o.mask[k];
  return o;
}

Observation empty_observation(const WorldConfig& cfg) {
  Observation o;
  o.obs.assign(obs_width(cfg), 0.0);
  o.mask.assign(cfg.action_slots, 0);
  o.slot_ids.assign(cfg.action_slots, std::nullopt);
  return o;
}

PatternSpec pattern_spec_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw PatternError(std::string("pattern spec: ") + e.what());
  }
  try {
    PatternSpec s;
    s.kind = pattern_kind_from(j.at("kind").get<std::string>());
    if (j.contains("param")) s.param = j["param"].get<double>();
    else if (j.contains("r")) s.param = j["r"].get<double>();
    else if (j.contains("s")) s.param = j["s"].get<double>();
    s.region_length = j.value("region_length", s.region_length);
    s.belt_width = j.value("belt_width", s.belt_width);
    s.grid_jitter = j.value("grid_jitter", s.grid_jitter);
    s.seed = j.value("seed", s.seed);
    check_spec(s);
    return s;
  } catch (const ordered_json::exception& e) {
    throw PatternError(std::string("pattern spec: ") + e.what());
  }
}

PatternRegistry PatternRegistry::with_presets() {
  PatternRegistry reg;
  for (const char* name : {"paper-4", "mixed", "overload"}) {
    for (const auto& ns : preset(name)) reg.add(ns.id, ns.spec);
  }
  return reg;
}

Pattern PatternRegistry::resolve(const std::string& ref_json, std::uint64_t seed) const {
  const auto ref = ordered_json::parse(ref_json);
  if (ref.is_string()) {
    const auto id = ref.get<std::string>();
    if (auto it = fixed_.find(id); it != fixed_.end()) return it->second;
    auto it = specs_.find(id);
    if (it == specs_.end()) throw UnknownPattern("unknown pattern '" + id + "'");
    PatternSpec s = it->second;
    s.seed = seed;
    return sample_pattern(s);
  }
  if (ref.is_object() && ref.contains("objects")) return pattern_from_json(ref.dump());
  if (ref.is_object() && ref.contains("kind")) {
    PatternSpec s = pattern_spec_from_json(ref.dump());
    if (!ref.contains("seed")) s.seed = seed;
    return sample_pattern(s);
  }
  throw PatternError("pattern reference must be an id, a pattern or a spec");
}

std::string error_reply(const std::string& code, const std::string& message) {
  ordered_json j;
  j["v"] = kProtocolVersion;
  j["error"] = code;
  if (!message.empty()) j["message"] = message;
  return j.dump();
}

BridgeSession::BridgeSession(WorldConfig cfg, std::shared_ptr<const PatternRegistry> registry)
    : cfg_(validated(cfg)), registry_(std::move(registry)) {}

std::string BridgeSession::handle(const std::string& line) {
  ordered_json msg;
  try {
    msg = ordered_json::parse(line);
  } catch (const ordered_json::parse_error& e) {
    return error_reply("parse", e.what());
  }
  if (!msg.is_object() || !msg.contains("cmd") || !msg["cmd"].is_string())
    return error_reply("parse", "expected an object with a string \"cmd\"");
  const auto cmd = msg["cmd"].get<std::string>();
  try {
    if (cmd == "reset") {
      if (!msg.contains("pattern")) return error_reply("parse", "reset needs \"pattern\"");
      std::uint64_t seed = 0;
      if (msg.contains("seed")) {
        if (!msg["seed"].is_number_unsigned()) return error_reply("range", "seed must be a non-negative integer");
        seed = msg["seed"].get<std::uint64_t>();
      }
      return reset(msg["pattern"].dump(), seed);
    }
    if (cmd == "act") {
      if (!msg.contains("slot") || !msg["slot"].is_number_integer())
        return error_reply("range", "act needs an integer \"slot\"");
      return act(msg["slot"].get<long long>());
    }
    if (cmd == "spec") {
      ordered_json j;
      j["v"] = kProtocolVersion;
      j["obs_width"] = obs_width(cfg_);
      j["action_slots"] = cfg_.action_slots;
      j["n_robots"] = cfg_.robots.size();
      j["config"] = ordered_json::parse(config_to_json(cfg_));
      return j.dump();
    }
    if (cmd == "close") {
      closed_ = true;
      episode_.reset();
      ordered_json j;
      j["v"] = kProtocolVersion;
      j["closed"] = true;
      return j.dump();
    }
    return error_reply("parse", "unknown cmd '" + cmd + "'");
  } catch (const UnknownPattern& e) {
    return error_reply("unknown_pattern", e.what());
  } catch (const PatternError& e) {
    return error_reply("pattern", e.what());
  } catch (const std::exception& e) {
    return error_reply("internal", e.what());
  }
}

std::string BridgeSession::reset(const std::string& pattern_ref, std::uint64_t seed) {
  const Pattern p = registry_->resolve(pattern_ref, seed);
  episode_ = std::make_unique<Episode>(cfg_, p, false);
  episode_->next_decision();
  return reply(episode_->take_reward(), false);
}

std::string BridgeSession::act(long long slot) {
  if (!episode_) return error_reply("no_episode");
  if (episode_->done()) return error_reply("done");
  if (slot < 0 || static_cast<std::size_t>(slot) >= cfg_.action_slots)
    return error_reply("range", "slot outside [0, action_slots)");
  const auto& req = episode_->next_decision();
  const auto k = static_cast<std::size_t>(slot);
  const bool valid = req && k < req->candidates.size();
  episode_->resolve(valid ? std::optional<std::size_t>(k) : std::nullopt);
  episode_->next_decision();
  return reply(episode_->take_reward(), !valid);
}

std::string BridgeSession::reply(double reward, bool noop) {
  const auto& req = episode_->next_decision();
  const World& w = episode_->world();
  const Observation o = req ? encode_observation(*req, cfg_) : empty_observation(cfg_);
  const auto stats = w.stats();

  ordered_json j;
  j["v"] = kProtocolVersion;
  j["obs"] = o.obs;
  j["mask"] = o.mask;
  j["reward"] = reward;
  j["done"] = episode_->done();
  ordered_json info;
  info["sim_time"] = w.sim_time();
  info["deciding_robot"] = req ? ordered_json(req->robot) : ordered_json(nullptr);
  info["n_picked"] = stats.n_picked;
  info["n_missed"] = stats.n_missed;
  info["noop"] = noop;
  ordered_json ids = ordered_json::array();
  for (const auto& id : o.slot_ids) ids.push_back(id ? ordered_json(*id) : ordered_json(nullptr));
  info["object_ids"] = std::move(ids);
  if (episode_->done()) info["stats"] = ordered_json::parse(stats_to_json(stats));
  j["info"] = std::move(info);
  return j.dump();
}

}  // namespace conveyor
