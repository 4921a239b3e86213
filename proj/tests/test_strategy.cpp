#include <doctest.h>

#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "conveyor/presets.hpp"
#include "conveyor/strategy.hpp"
#include "support.hpp"

using namespace conveyor;
using namespace testing_support;

namespace {

DecisionRequest request_with(std::vector<CandidateFeature> cands) {
  DecisionRequest r;
  r.base = {1.0, -0.45};
  r.candidates = std::move(cands);
  r.robot_status = {{}};
  return r;
}

double key_of(Rule rule, const CandidateFeature& c, const DecisionRequest& r) {
  switch (rule) {
    case Rule::FIFO: return c.x_rel + r.base.x;
    case Rule::SPT: return -c.t_process;
    case Rule::LPT: return c.t_process;
    case Rule::SD: return -std::hypot(c.x_rel, c.y_rel);
    case Rule::LD: return std::hypot(c.x_rel, c.y_rel);
    case Rule::PP: return c.reward;
  }
  return 0;
}

std::vector<Pattern> small_mixed(std::size_t n, std::uint64_t seed) {
  return sample_patterns(mixed_specs(3, 0.2, 0.4, 1.0), n, seed);
}

}  // namespace

TEST_CASE("rules on hand-built candidates") {
  auto r = request_with({{0, 0.1, 0.2, 3.1, 0.3}, {1, -0.2, 0.3, 2.2, 0.52}, {2, -0.4, 0.5, 4.0, 0.52}});
  CHECK(apply_rule(Rule::SPT, r) == 1);
  CHECK(apply_rule(Rule::LPT, r) == 2);
  CHECK(apply_rule(Rule::PP, r) == 1);
  CHECK(apply_rule(Rule::FIFO, r) == 0);
  r.candidates = {{7, 0.1, 0.2, 3.1, 0.3}, {3, 0.1, 0.25, 2.0, 0.3}};
  CHECK(apply_rule(Rule::FIFO, r) == 1);
  r.candidates.clear();
  CHECK_THROWS_AS(apply_rule(Rule::SPT, r), EmptyCandidates);
}

TEST_CASE("rules agree with a linear scan and are scale invariant") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1), t(1, 8), rw(0, 1);
  std::uniform_int_distribution<int> coarse(0, 3);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<CandidateFeature> cs;
    const int n = 1 + trial % 10;
    for (int i = 0; i < n; ++i) {
      // coarse values force ties
      cs.push_back({static_cast<ObjectId>(n - i), trial % 2 ? u(rng) : coarse(rng) * 0.1, u(rng),
                    trial % 3 ? t(rng) : 1.0 + coarse(rng), trial % 2 ? rw(rng) : coarse(rng) * 0.25});
    }
    const auto req = request_with(cs);
    for (Rule rule : kAllRules) {
      const std::size_t expect = [&] {
        std::size_t best = 0;
        for (std::size_t i = 1; i < cs.size(); ++i) {
          const double a = key_of(rule, cs[i], req), b = key_of(rule, cs[best], req);
          if (a > b || (a == b && cs[i].object_id < cs[best].object_id)) best = i;
        }
        return best;
      }();
      REQUIRE(apply_rule(rule, req) == expect);
      auto scaled = req;
      for (auto& c : scaled.candidates) {
        c.t_process *= 2.5;
        c.reward *= 0.5;
      }
      CHECK(apply_rule(rule, scaled) == expect);
    }
  }
}

TEST_CASE("combo names") {
  CHECK(to_string(combo_from("SPT,FIFO")) == "SPT,FIFO");
  CHECK(combo_from("SD,LD").rules == std::vector<Rule>{Rule::SD, Rule::LD});
  CHECK_THROWS(combo_from("SPT,XYZ"));
}

TEST_CASE("monte carlo eval: single pattern equals the episode") {
  const auto cfg = default_config(2, 0.05);
  PatternSpec s;
  s.seed = 9;
  const auto rep = monte_carlo_eval(combo_from("SPT,FIFO"), {s}, 1, cfg, 3);
  const auto p = sample_patterns({s}, 1, 3).front();
  const auto res = run_episode(cfg, p, rule_controller(combo_from("SPT,FIFO")), false);
  REQUIRE(rep.per_pattern.size() == 1);
  CHECK(rep.per_pattern[0] == res.stats);
  CHECK(rep.mean_picked_fraction == res.stats.picked_fraction());
  CHECK(rep.mean_picks_per_minute == res.stats.picks_per_minute);
}

TEST_CASE("monte carlo eval: deterministic and means are averages") {
  const auto cfg = default_config(2, 0.05);
  const auto specs = mixed_specs(2, 0.2, 0.3, 1.0);
  const auto a = monte_carlo_eval(combo_from("SPT,FIFO"), specs, 6, cfg, 1);
  const auto b = monte_carlo_eval(combo_from("SPT,FIFO"), specs, 6, cfg, 1);
  CHECK(a.mean_score == b.mean_score);
  CHECK(a.per_pattern == b.per_pattern);
  double sum = 0;
  for (const auto& s : a.per_pattern) sum += s.picked_fraction();
  CHECK(a.mean_picked_fraction == doctest::Approx(sum / 6));
}

TEST_CASE("SPT,FIFO picks at least as much as LD,LD on dense grids") {
  const auto cfg = default_config(2, 0.05);
  PatternSpec s;
  s.kind = PatternKind::grid;
  s.param = 0.15;
  const auto good = monte_carlo_eval(combo_from("SPT,FIFO"), {s}, 4, cfg, 2);
  const auto bad = monte_carlo_eval(combo_from("LD,LD"), {s}, 4, cfg, 2);
  CHECK(good.mean_picked_fraction >= bad.mean_picked_fraction);
}

TEST_CASE("grasp: sparse single robot ends on a neighbourhood without improvement") {
  auto cfg = default_config(1, 0.03);
  PatternSpec s;
  s.param = 0.4;
  s.region_length = 1.0;
  GraspOptions o;
  o.iterations = 2;
  o.n_samples = 3;
  const auto res = grasp_search({s}, cfg, o);
  CHECK(res.report.mean_picked_fraction == 1.0);
  REQUIRE(res.trace.back().phase == "final");
  // every iteration closes with a non-improving local step
  for (std::size_t i = 0; i + 1 < res.trace.size(); ++i) {
    if (res.trace[i].phase == "local" && res.trace[i + 1].phase != "local") CHECK_FALSE(res.trace[i].improved);
  }
  const auto ps = sample_patterns({s}, 3, o.seed);
  for (Rule r : kAllRules) CHECK_FALSE(better(evaluate_rules({r}, ps, cfg), res.report));
}

TEST_CASE("grasp: trace is reproducible and local search is monotone") {
  const auto cfg = default_config(2, 0.06);
  const auto ps = small_mixed(6, 4);
  GraspOptions o;
  o.iterations = 3;
  o.seed = 17;
  const auto a = grasp_over(ps, cfg, o);
  const auto b = grasp_over(ps, cfg, o);
  CHECK(trace_to_jsonl(a.trace) == trace_to_jsonl(b.trace));
  CHECK(a.best == b.best);

  std::map<std::size_t, double> incumbent;
  for (const auto& e : a.trace) {
    if (e.phase == "construct") {
      CHECK(e.rcl.size() <= o.rcl_size);
      CHECK_FALSE(e.rcl.empty());
      incumbent.erase(e.iteration);
    }
    if (e.phase == "local") {
      if (incumbent.count(e.iteration)) CHECK(e.score >= incumbent[e.iteration]);
      incumbent[e.iteration] = e.score;
    }
  }
  // the reported best is at least as good as every evaluated full combo
  for (const auto& e : a.trace)
    if (e.combo.find('-') == std::string::npos) CHECK(a.report.mean_score >= e.score - 1e-12);
  std::istringstream lines(trace_to_jsonl(a.trace));
  std::size_t n_lines = 0;
  for (std::string line; std::getline(lines, line); ++n_lines) CHECK(nlohmann::json::parse(line).contains("phase"));
  CHECK(n_lines == a.trace.size());
}

TEST_CASE("greedy_gt enumerates all combos and matches a full scan") {
  const auto cfg = default_config(2, 0.06);
  PatternSpec s;
  s.kind = PatternKind::grid;
  s.param = 0.2;
  s.region_length = 1.0;
  const auto p = sample_pattern(s);
  const auto res = greedy_gt(p, cfg);
  CHECK(res.trace.size() == 36);

  // independent enumeration
  StrategyCombo best;
  EpisodeStats best_stats;
  bool first = true;
  for (Rule a : kAllRules) {
    for (Rule b : kAllRules) {
      const StrategyCombo c{{a, b}};
      const auto st = run_episode(cfg, p, rule_controller(c), false).stats;
      const bool take = first || st.picks_per_minute > best_stats.picks_per_minute ||
                        (st.picks_per_minute == best_stats.picks_per_minute &&
                         (st.completion_time < best_stats.completion_time ||
                          (st.completion_time == best_stats.completion_time && c < best)));
      if (take) {
        best = c;
        best_stats = st;
        first = false;
      }
    }
  }
  CHECK(res.best == best);

  const auto on_p = run_episode(cfg, p, rule_controller(combo_from("SPT,FIFO")), false).stats;
  CHECK(res.report.mean_picks_per_minute >= on_p.picks_per_minute);
}
