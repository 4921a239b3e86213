#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conveyor/patterns.hpp"
#include "conveyor/rules.hpp"

namespace conveyor {

/// Search objective for one episode: picks per minute weighted by the
/// reward-weighted picking rate.
double episode_score(const EpisodeStats& s);

struct EvalReport {
  StrategyCombo combo;
  double mean_picked_fraction = 0.0;
  double mean_picks_per_minute = 0.0;
  double mean_reward_weighted_rate = 0.0;
  double mean_score = 0.0;
  std::vector<EpisodeStats> per_pattern;
};

/// Strict total order: higher mean score, then higher picked fraction,
/// then earlier rule order.
bool better(const EvalReport& a, const EvalReport& b);

/// Derives the i-th sample seed from a base seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t i);

/// n patterns cycling through `specs` in order, each with a derived seed.
std::vector<Pattern> sample_patterns(const std::vector<PatternSpec>& specs, std::size_t n, std::uint64_t seed);

/// Plays `rules` (nullopt = robot disabled) on every pattern and averages.
EvalReport evaluate_rules(const std::vector<std::optional<Rule>>& rules, const std::vector<Pattern>& patterns,
                          const WorldConfig& cfg);

EvalReport monte_carlo_eval(const StrategyCombo& combo, const std::vector<PatternSpec>& specs, std::size_t n_samples,
                            const WorldConfig& cfg, std::uint64_t seed);

struct GraspOptions {
  std::size_t iterations = 8;
  std::size_t rcl_size = 2;
  std::size_t n_samples = 40;
  std::uint64_t seed = 0;
};

struct TraceEntry {
  std::size_t iteration = 0;
  std::string phase;              // "construct", "local", "final", "enumerate"
  std::optional<std::size_t> robot;
  std::vector<std::string> rcl;   // construction only
  std::string combo;              // unassigned robots shown as '-'
  double score = 0.0;
  double picked_fraction = 0.0;
  bool improved = false;
};

struct SearchResult {
  StrategyCombo best;
  EvalReport report;
  std::vector<TraceEntry> trace;
  std::size_t evaluations = 0;   // distinct episode-set evaluations performed
};

/// GRASP over a fixed pattern sample set (common random numbers): greedy
/// randomized construction robot by robot, then best-improvement hill
/// climbing over single-robot rule changes.
SearchResult grasp_over(const std::vector<Pattern>& patterns, const WorldConfig& cfg, const GraspOptions& opts);

/// Samples opts.n_samples patterns from `specs` and runs grasp_over.
SearchResult grasp_search(const std::vector<PatternSpec>& specs, const WorldConfig& cfg, const GraspOptions& opts);

inline constexpr std::size_t kMaxEnumerationRobots = 6;

/// Best combination for a single pattern by exhaustive enumeration
/// (picks per minute, then shorter completion, then rule order). Above
/// kMaxEnumerationRobots robots falls back to grasp_over on that pattern.
SearchResult greedy_gt(const Pattern& pattern, const WorldConfig& cfg);

std::string trace_to_jsonl(const std::vector<TraceEntry>& trace);

}  // namespace conveyor
