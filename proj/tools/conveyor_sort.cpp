// conveyor_sort: pattern generation, episodes, strategy search, benchmarks
// and the environment bridge.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "conveyor/bench.hpp"
#include "conveyor/bridge.hpp"
#include "conveyor/net.hpp"
#include "conveyor/presets.hpp"
#include "conveyor/strategy.hpp"

namespace fs = std::filesystem;
using namespace conveyor;

namespace {

struct WorldOpts {
  std::string config_path;
  std::size_t robots = 2;
  double belt_speed = kNominalBeltSpeed;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "World config JSON (overrides --robots/--belt-speed)");
    app->add_option("--robots", robots, "Number of robots in the default layout")->check(CLI::Range(1, 16));
    app->add_option("--belt-speed", belt_speed, "Belt speed, m/s");
  }
  WorldConfig build() const {
    if (!config_path.empty()) return validated(load_config(config_path));
    return validated(default_config(robots, belt_speed));
  }
};

// A directory of pattern files, a single pattern file, or a preset name.
struct PatternSource {
  std::vector<NamedPattern> fixed;
  std::vector<PatternSpec> specs;
};

PatternSource load_source(const std::string& ref, std::uint64_t seed) {
  PatternSource src;
  if (fs::is_directory(ref)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(ref))
      if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) src.fixed.push_back({f.stem().string(), load_pattern(f)});
    if (src.fixed.empty()) throw std::runtime_error("no .json patterns in " + ref);
  } else if (fs::is_regular_file(ref)) {
    src.fixed.push_back({fs::path(ref).stem().string(), load_pattern(ref)});
  } else {
    for (const auto& ns : preset(ref, seed)) src.specs.push_back(ns.spec);
  }
  return src;
}

std::vector<NamedPattern> concrete(const std::string& preset_name, std::uint64_t seed) {
  std::vector<NamedPattern> out;
  if (fs::exists(preset_name)) return load_source(preset_name, seed).fixed;
  for (const auto& ns : preset(preset_name, seed)) out.push_back({ns.label, sample_pattern(ns.spec)});
  return out;
}

std::string report_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["combo"] = to_string(r.combo);
  j["mean_picked_fraction"] = r.mean_picked_fraction;
  j["mean_picks_per_minute"] = r.mean_picks_per_minute;
  j["mean_reward_weighted_rate"] = r.mean_reward_weighted_rate;
  j["mean_score"] = r.mean_score;
  j["n_patterns"] = r.per_pattern.size();
  return j.dump();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conveyor-belt multi-robot sorting simulator"};
  app.require_subcommand(1);

  // pattern gen
  auto* pattern_cmd = app.add_subcommand("pattern", "Pattern tools");
  pattern_cmd->require_subcommand(1);
  auto* gen = pattern_cmd->add_subcommand("gen", "Sample a pattern");
  std::string kind = "poisson";
  double r = 0, s = 0, length = kDefaultRegionLength, width = 0.6, jitter = 0;
  std::uint64_t seed = 0;
  std::string out_path;
  gen->add_option("--kind", kind, "poisson | grid")->check(CLI::IsMember({"poisson", "poisson_disk", "grid"}));
  gen->add_option("--r", r, "Poisson minimum radius, m");
  gen->add_option("--s", s, "Grid pitch, m");
  gen->add_option("--length", length, "Region length, m");
  gen->add_option("--width", width, "Belt width, m");
  gen->add_option("--jitter", jitter, "Grid jitter, m");
  gen->add_option("--seed", seed);
  gen->add_option("--out", out_path, "Output file (stdout if omitted)");

  // run
  auto* run = app.add_subcommand("run", "Play one episode");
  WorldOpts run_world;
  run_world.attach(run);
  std::string run_pattern, run_combo = "SPT,FIFO", log_path;
  run->add_option("--pattern", run_pattern, "Pattern file or registered id")->required();
  run->add_option("--combo", run_combo, "Rule per robot, e.g. SPT,FIFO");
  run->add_option("--seed", seed, "Sampling seed for registered ids");
  run->add_option("--log", log_path, "Write the event log (JSON lines)");

  // strategy
  auto* strategy = app.add_subcommand("strategy", "Rule combinations");
  strategy->require_subcommand(1);
  auto* eval = strategy->add_subcommand("eval", "Monte-Carlo evaluation of one combo");
  WorldOpts eval_world;
  eval_world.attach(eval);
  std::string eval_combo = "SPT,FIFO", patterns_ref = "mixed";
  std::size_t samples = 40;
  eval->add_option("--combo", eval_combo);
  eval->add_option("--patterns", patterns_ref, "Directory, pattern file or preset name");
  eval->add_option("--samples", samples)->check(CLI::PositiveNumber);
  eval->add_option("--seed", seed);

  auto* search = strategy->add_subcommand("search", "GRASP search for a robust combo");
  WorldOpts search_world;
  search_world.attach(search);
  GraspOptions gopts;
  std::string trace_path;
  search->add_option("--patterns", patterns_ref, "Directory, pattern file or preset name");
  search->add_option("--iterations", gopts.iterations)->check(CLI::PositiveNumber);
  search->add_option("--rcl", gopts.rcl_size)->check(CLI::PositiveNumber);
  search->add_option("--samples", gopts.n_samples)->check(CLI::PositiveNumber);
  search->add_option("--seed", gopts.seed);
  search->add_option("--trace", trace_path, "Write the search trace (JSON lines)");

  // bench
  auto* bench = app.add_subcommand("bench", "Benchmarks");
  bench->require_subcommand(1);
  auto* cmp = bench->add_subcommand("compare", "Controllers x patterns table");
  WorldOpts cmp_world;
  cmp_world.attach(cmp);
  std::string bench_preset = "paper-4", controllers = "robust-gt,greedy-gt", robust = "SPT,FIFO";
  cmp->add_option("--preset", bench_preset, "Preset name or pattern directory");
  cmp->add_option("--controllers", controllers,
                  "Comma list: robust-gt, greedy-gt, bridge:<host:port>, or combos written SPT/FIFO");
  cmp->add_option("--robust", robust, "Combo used by robust-gt");
  cmp->add_option("--seed", seed);
  cmp->add_option("--out", out_path, "CSV output");

  auto* maxspeed = bench->add_subcommand("maxspeed", "Largest belt speed with every object picked");
  WorldOpts ms_world;
  ms_world.attach(maxspeed);
  std::string ms_controller = "robust-gt", ms_pattern = "grid-0.15";
  MaxSpeedOptions ms_opts;
  maxspeed->add_option("--controller", ms_controller);
  maxspeed->add_option("--robust", robust, "Combo used by robust-gt");
  maxspeed->add_option("--pattern", ms_pattern, "Pattern file or registered id");
  maxspeed->add_option("--seed", seed);
  maxspeed->add_option("--lo", ms_opts.lo);
  maxspeed->add_option("--hi", ms_opts.hi);
  maxspeed->add_option("--tol", ms_opts.tol);

  // serve
  auto* serve = app.add_subcommand("serve", "Environment bridge");
  WorldOpts serve_world;
  serve_world.attach(serve);
  std::string bind = "127.0.0.1:5555";
  bool use_stdio = false;
  serve->add_option("--bind", bind, "host:port to listen on");
  serve->add_flag("--stdio", use_stdio, "Serve one session over stdin/stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    auto registry = std::make_shared<PatternRegistry>(PatternRegistry::with_presets());
    auto resolve_pattern = [&](const std::string& ref) {
      if (fs::is_regular_file(ref)) return load_pattern(ref);
      return registry->resolve(nlohmann::json(ref).dump(), seed);
    };

    if (gen->parsed()) {
      PatternSpec spec;
      spec.kind = kind == "grid" ? PatternKind::grid : PatternKind::poisson_disk;
      spec.param = spec.kind == PatternKind::grid ? s : r;
      spec.region_length = length;
      spec.belt_width = width;
      spec.grid_jitter = jitter;
      spec.seed = seed;
      const Pattern p = sample_pattern(spec);
      if (out_path.empty()) std::cout << pattern_to_json(p) << '\n';
      else save_pattern(p, out_path);
      std::cerr << p.objects.size() << " objects\n";
    } else if (run->parsed()) {
      const WorldConfig cfg = run_world.build();
      const auto res = run_episode(cfg, resolve_pattern(run_pattern), rule_controller(combo_from(run_combo)),
                                   !log_path.empty());
      if (!log_path.empty()) write_text(log_path, res.log.to_jsonl());
      std::cout << stats_to_json(res.stats) << '\n';
    } else if (eval->parsed()) {
      const WorldConfig cfg = eval_world.build();
      const auto src = load_source(patterns_ref, seed);
      EvalReport rep;
      if (!src.fixed.empty()) {
        std::vector<Pattern> ps;
        for (const auto& np : src.fixed) ps.push_back(np.pattern);
        const auto combo = combo_from(eval_combo);
        rep = evaluate_rules({combo.rules.begin(), combo.rules.end()}, ps, cfg);
        rep.combo = combo;
      } else {
        rep = monte_carlo_eval(combo_from(eval_combo), src.specs, samples, cfg, seed);
      }
      std::cout << report_json(rep) << '\n';
    } else if (search->parsed()) {
      const WorldConfig cfg = search_world.build();
      const auto src = load_source(patterns_ref, gopts.seed);
      SearchResult res;
      if (!src.fixed.empty()) {
        std::vector<Pattern> ps;
        for (const auto& np : src.fixed) ps.push_back(np.pattern);
        res = grasp_over(ps, cfg, gopts);
      } else {
        res = grasp_search(src.specs, cfg, gopts);
      }
      if (!trace_path.empty()) write_text(trace_path, trace_to_jsonl(res.trace));
      std::cout << report_json(res.report) << '\n';
    } else if (cmp->parsed()) {
      const WorldConfig cfg = cmp_world.build();
      const auto combo = combo_from(robust);
      std::vector<NamedController> ctrls;
      for (auto name : split(controllers, ',')) {
        std::replace(name.begin(), name.end(), '/', ',');
        ctrls.push_back({name, controller_by_name(name, combo)});
      }
      const auto rows = compare(ctrls, concrete(bench_preset, seed), cfg);
      std::printf("%-16s %-16s %9s %9s %11s\n", "controller", "pattern", "picked %", "time s", "picks/min");
      for (const auto& row : rows)
        std::printf("%-16s %-16s %9.1f %9.1f %11.2f\n", row.controller.c_str(), row.pattern.c_str(),
                    row.picked_pct, row.time_s, row.picks_per_min);
      if (ctrls.size() >= 2) {
        for (std::size_t i = 0; i + ctrls.size() - 1 < rows.size(); i += ctrls.size()) {
          for (std::size_t k = 1; k < ctrls.size(); ++k) {
            const auto& a = rows[i];
            const auto& b = rows[i + k];
            if (a.picks_per_min > 0)
              std::printf("benefit %s over %s on %s: %+.1f%%\n", b.controller.c_str(), a.controller.c_str(),
                          a.pattern.c_str(), benefit_pct(a.picks_per_min, b.picks_per_min));
          }
        }
      }
      if (!out_path.empty()) export_plot_data(to_metric_rows(rows), out_path);
    } else if (maxspeed->parsed()) {
      const WorldConfig cfg = ms_world.build();
      std::string name = ms_controller;
      std::replace(name.begin(), name.end(), '/', ',');
      const auto res =
          max_belt_speed(controller_by_name(name, combo_from(robust)), resolve_pattern(ms_pattern), cfg, ms_opts);
      for (const auto& smp : res.samples)
        std::printf("speed %.4f  %s\n", smp.speed, smp.all_picked ? "all picked" : "misses");
      if (!res.monotone) std::printf("warning: feasibility is not monotone over the scan\n");
      std::printf("max belt speed: %.4f m/s\n", res.speed);
    } else if (serve->parsed()) {
      const WorldConfig cfg = serve_world.build();
      if (use_stdio) {
        serve_stream(cfg, registry, std::cin, std::cout);
      } else {
        BridgeServer server(cfg, registry, parse_endpoint(bind));
        std::cerr << "listening on port " << server.port() << '\n';
        server.run();
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
