#include "conveyor/rules.hpp"

#include <cmath>

namespace conveyor {

std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::FIFO: return "FIFO";
    case Rule::SPT: return "SPT";
    case Rule::LPT: return "LPT";
    case Rule::SD: return "SD";
    case Rule::LD: return "LD";
    case Rule::PP: return "PP";
  }
  return "?";
}

Rule rule_from(std::string_view name) {
  for (Rule r : kAllRules) {
    if (to_string(r) == name) return r;
  }
  throw std::invalid_argument("unknown rule '" + std::string(name) + "'");
}

namespace {

// Key whose maximum the rule selects.
double rule_key(Rule rule, const DecisionRequest& req, const CandidateFeature& c) {
  switch (rule) {
    case Rule::FIFO: return c.x_rel + req.base.x;
    case Rule::SPT: return -c.t_process;
    case Rule::LPT: return c.t_process;
    case Rule::SD: return -std::hypot(c.x_rel, c.y_rel);
    case Rule::LD: return std::hypot(c.x_rel, c.y_rel);
    case Rule::PP: return c.reward;
  }
  return 0.0;
}

}  // namespace

std::size_t apply_rule(Rule rule, const DecisionRequest& request) {
  const auto& cs = request.candidates;
  if (cs.empty()) throw EmptyCandidates();
  std::size_t best = 0;
  double best_key = rule_key(rule, request, cs[0]);
  for (std::size_t i = 1; i < cs.size(); ++i) {
    const double k = rule_key(rule, request, cs[i]);
    if (k > best_key || (k == best_key && cs[i].object_id < cs[best].object_id)) {
      best = i;
      best_key = k;
    }
  }
  return best;
}

std::string to_string(const StrategyCombo& combo) {
  std::string out;
  for (std::size_t i = 0; i < combo.rules.size(); ++i) {
    if (i) out += ',';
    out += to_string(combo.rules[i]);
  }
  return out;
}

StrategyCombo combo_from(std::string_view text) {
  StrategyCombo combo;
  while (!text.empty()) {
    const auto comma = text.find(',');
    auto token = text.substr(0, comma);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    combo.rules.push_back(rule_from(token));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (combo.rules.empty()) throw std::invalid_argument("empty strategy combination");
  return combo;
}

Controller rule_controller(std::vector<std::optional<Rule>> rules) {
  return [rules = std::move(rules)](const DecisionRequest& req) -> std::optional<std::size_t> {
    if (req.robot >= rules.size() || !rules[req.robot]) return std::nullopt;
    return apply_rule(*rules[req.robot], req);
  };
}

Controller rule_controller(const StrategyCombo& combo) {
  return rule_controller(std::vector<std::optional<Rule>>(combo.rules.begin(), combo.rules.end()));
}

}  // namespace conveyor
