#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "conveyor/episode.hpp"

namespace conveyor {

/// Single-robot dispatching rules.
enum class Rule {
  FIFO,  // furthest along the belt
  SPT,   // shortest processing time
  LPT,   // longest processing time
  SD,    // shortest distance to the robot base
  LD,    // longest distance to the robot base
  PP,    // highest object reward
};

inline constexpr std::array<Rule, 6> kAllRules = {Rule::FIFO, Rule::SPT, Rule::LPT, Rule::SD, Rule::LD, Rule::PP};

std::string_view to_string(Rule r);
Rule rule_from(std::string_view name);  // throws std::invalid_argument

class EmptyCandidates : public std::invalid_argument {
 public:
  EmptyCandidates() : std::invalid_argument("apply_rule: no candidates") {}
};

/// Index of the candidate chosen by `rule`; ties go to the lowest object id.
std::size_t apply_rule(Rule rule, const DecisionRequest& request);

/// One rule per robot index.
struct StrategyCombo {
  std::vector<Rule> rules;

  friend bool operator==(const StrategyCombo&, const StrategyCombo&) = default;
  friend auto operator<=>(const StrategyCombo&, const StrategyCombo&) = default;
};

std::string to_string(const StrategyCombo& combo);       // "SPT,FIFO"
StrategyCombo combo_from(std::string_view text);          // inverse of to_string

/// Controller playing combo.rules[robot]. A robot whose entry is nullopt
/// never picks (used for partially assigned combos).
Controller rule_controller(std::vector<std::optional<Rule>> rules);
Controller rule_controller(const StrategyCombo& combo);

}  // namespace conveyor
