#include "conveyor/strategy.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <thread>

#include <json.hpp>

namespace conveyor {

double episode_score(const EpisodeStats& s) { return s.picks_per_minute * s.reward_weighted_rate; }

bool better(const EvalReport& a, const EvalReport& b) {
  if (a.mean_score != b.mean_score) return a.mean_score > b.mean_score;
  if (a.mean_picked_fraction != b.mean_picked_fraction) return a.mean_picked_fraction > b.mean_picked_fraction;
  return a.combo < b.combo;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t i) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (i + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<Pattern> sample_patterns(const std::vector<PatternSpec>& specs, std::size_t n, std::uint64_t seed) {
  if (specs.empty()) throw PatternError("sample_patterns: no pattern specs");
  std::vector<Pattern> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    PatternSpec spec = specs[i % specs.size()];
    spec.seed = derive_seed(seed, i);
    out.push_back(sample_pattern(spec));
  }
  return out;
}

namespace {

// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads. Each
// index writes its own slot, so the result does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
}

std::string partial_name(const std::vector<std::optional<Rule>>& rules) {
  std::string out;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (i) out += ',';
    out += rules[i] ? std::string(to_string(*rules[i])) : std::string("-");
  }
  return out;
}

StrategyCombo complete(const std::vector<std::optional<Rule>>& rules) {
  StrategyCombo c;
  for (const auto& r : rules) c.rules.push_back(r.value_or(Rule::FIFO));
  return c;
}

}  // namespace

EvalReport evaluate_rules(const std::vector<std::optional<Rule>>& rules, const std::vector<Pattern>& patterns,
                          const WorldConfig& cfg) {
  EvalReport rep;
  rep.combo = complete(rules);
  rep.per_pattern.resize(patterns.size());
  const Controller ctl = rule_controller(rules);
  parallel_for(patterns.size(), [&](std::size_t i) {
    rep.per_pattern[i] = run_episode(cfg, patterns[i], ctl, false).stats;
  });
  if (patterns.empty()) return rep;
  for (const auto& s : rep.per_pattern) {
    rep.mean_picked_fraction += s.picked_fraction();
    rep.mean_picks_per_minute += s.picks_per_minute;
    rep.mean_reward_weighted_rate += s.reward_weighted_rate;
    rep.mean_score += episode_score(s);
  }
  const double n = static_cast<double>(patterns.size());
  rep.mean_picked_fraction /= n;
  rep.mean_picks_per_minute /= n;
  rep.mean_reward_weighted_rate /= n;
  rep.mean_score /= n;
  return rep;
}

EvalReport monte_carlo_eval(const StrategyCombo& combo, const std::vector<PatternSpec>& specs, std::size_t n_samples,
                            const WorldConfig& cfg, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("monte_carlo_eval: n_samples must be >= 1");
  if (combo.rules.size() != cfg.robots.size())
    throw std::invalid_argument("monte_carlo_eval: combo length differs from robot count");
  const auto patterns = sample_patterns(specs, n_samples, seed);
  return evaluate_rules({combo.rules.begin(), combo.rules.end()}, patterns, cfg);
}

SearchResult grasp_over(const std::vector<Pattern>& patterns, const WorldConfig& cfg, const GraspOptions& opts) {
  if (opts.iterations < 1) throw std::invalid_argument("grasp: iterations must be >= 1");
  if (opts.rcl_size < 1) throw std::invalid_argument("grasp: rcl_size must be >= 1");
  const std::size_t n = cfg.robots.size();
  SearchResult result;
  std::map<std::vector<std::optional<Rule>>, EvalReport> memo;
  auto eval = [&](const std::vector<std::optional<Rule>>& rules) -> const EvalReport& {
    auto it = memo.find(rules);
    if (it == memo.end()) {
      ++result.evaluations;
      it = memo.emplace(rules, evaluate_rules(rules, patterns, cfg)).first;
    }
    return it->second;
  };

  std::mt19937_64 rng(opts.seed);
  std::optional<EvalReport> best;
  for (std::size_t it = 0; it < opts.iterations; ++it) {
    // Greedy randomized construction, upstream robot first.
    std::vector<std::optional<Rule>> partial(n);
    for (std::size_t r = 0; r < n; ++r) {
      std::vector<std::pair<Rule, const EvalReport*>> ranked;
      for (Rule rule : kAllRules) {
        auto trial = partial;
        trial[r] = rule;
        ranked.emplace_back(rule, &eval(trial));
      }
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const auto& a, const auto& b) { return better(*a.second, *b.second); });
      const std::size_t k = std::min(opts.rcl_size, ranked.size());
      const std::size_t pick = static_cast<std::size_t>(rng() % k);
      partial[r] = ranked[pick].first;
      TraceEntry e;
      e.iteration = it;
      e.phase = "construct";
      e.robot = r;
      for (std::size_t j = 0; j < k; ++j) e.rcl.emplace_back(to_string(ranked[j].first));
      e.combo = partial_name(partial);
      e.score = ranked[pick].second->mean_score;
      e.picked_fraction = ranked[pick].second->mean_picked_fraction;
      result.trace.push_back(std::move(e));
    }

    // Best-improvement local search over one-robot rule changes.
    EvalReport incumbent = eval(partial);
    for (;;) {
      std::optional<std::vector<std::optional<Rule>>> move;
      const EvalReport* move_rep = &incumbent;
      for (std::size_t r = 0; r < n; ++r) {
        for (Rule rule : kAllRules) {
          if (partial[r] == rule) continue;
          auto trial = partial;
          trial[r] = rule;
          const EvalReport& rep = eval(trial);
          if (better(rep, *move_rep)) {
            move = trial;
            move_rep = &rep;
          }
        }
      }
      TraceEntry e;
      e.iteration = it;
      e.phase = "local";
      if (!move) {
        e.combo = partial_name(partial);
        e.score = incumbent.mean_score;
        e.picked_fraction = incumbent.mean_picked_fraction;
        result.trace.push_back(std::move(e));
        break;
      }
      for (std::size_t r = 0; r < n; ++r) {
        if ((*move)[r] != partial[r]) e.robot = r;
      }
      partial = *move;
      incumbent = *move_rep;
      e.combo = partial_name(partial);
      e.score = incumbent.mean_score;
      e.picked_fraction = incumbent.mean_picked_fraction;
      e.improved = true;
      result.trace.push_back(std::move(e));
    }
    if (!best || better(incumbent, *best)) best = incumbent;
  }

  result.best = best->combo;
  result.report = *best;
  TraceEntry fin;
  fin.iteration = opts.iterations;
  fin.phase = "final";
  fin.combo = to_string(result.best);
  fin.score = result.report.mean_score;
  fin.picked_fraction = result.report.mean_picked_fraction;
  result.trace.push_back(std::move(fin));
  return result;
}

SearchResult grasp_search(const std::vector<PatternSpec>& specs, const WorldConfig& cfg, const GraspOptions& opts) {
  return grasp_over(sample_patterns(specs, std::max<std::size_t>(1, opts.n_samples), opts.seed), cfg, opts);
}

SearchResult greedy_gt(const Pattern& pattern, const WorldConfig& cfg) {
  const std::size_t n = cfg.robots.size();
  if (n > kMaxEnumerationRobots) return grasp_over({pattern}, cfg, GraspOptions{});

  SearchResult result;
  const std::vector<Pattern> one{pattern};
  std::vector<std::size_t> digits(n, 0);
  std::optional<EvalReport> best;
  for (;;) {
    std::vector<std::optional<Rule>> rules;
    for (auto d : digits) rules.emplace_back(kAllRules[d]);
    EvalReport rep = evaluate_rules(rules, one, cfg);
    ++result.evaluations;
    const auto& s = rep.per_pattern.front();
    bool improved = false;
    if (!best) {
      improved = true;
    } else {
      const auto& b = best->per_pattern.front();
      improved = s.picks_per_minute > b.picks_per_minute ||
                 (s.picks_per_minute == b.picks_per_minute && s.completion_time < b.completion_time);
    }
    TraceEntry e;
    e.phase = "enumerate";
    e.combo = to_string(rep.combo);
    e.score = s.picks_per_minute;
    e.picked_fraction = s.picked_fraction();
    e.improved = improved;
    result.trace.push_back(std::move(e));
    if (improved) best = std::move(rep);

    // Odometer increment, last robot fastest, so enumeration is lexicographic.
    bool carry = true;
    for (std::size_t p = n; p-- > 0 && carry;) {
      if (++digits[p] < kAllRules.size()) {
        carry = false;
      } else {
        digits[p] = 0;
      }
    }
    if (carry) break;
  }
  result.best = best->combo;
  result.report = *best;
  return result;
}

std::string trace_to_jsonl(const std::vector<TraceEntry>& trace) {
  std::string out;
  for (const auto& e : trace) {
    nlohmann::ordered_json j;
    j["iteration"] = e.iteration;
    j["phase"] = e.phase;
    j["robot"] = e.robot ? nlohmann::ordered_json(*e.robot) : nlohmann::ordered_json(nullptr);
    j["rcl"] = e.rcl;
    j["combo"] = e.combo;
    j["score"] = e.score;
    j["picked_fraction"] = e.picked_fraction;
    j["improved"] = e.improved;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace conveyor
