#include "conveyor/bench.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "conveyor/net.hpp"
#include "conveyor/strategy.hpp"

namespace conveyor {

std::vector<ComparisonRow> compare(const std::vector<NamedController>& controllers,
                                   const std::vector<NamedPattern>& patterns, const WorldConfig& cfg) {
  if (controllers.empty() || patterns.empty()) throw std::invalid_argument("compare: need controllers and patterns");
  std::vector<ComparisonRow> rows;
  for (const auto& p : patterns) {
    for (const auto& c : controllers) {
      const auto res = run_episode(cfg, p.pattern, c.make(p.pattern, cfg), false);
      rows.push_back({c.name, p.name, 100.0 * res.stats.picked_fraction(), res.stats.completion_time,
                      res.stats.picks_per_minute});
    }
  }
  return rows;
}

double benefit_pct(double a, double b) {
  if (a == 0.0) throw std::domain_error("benefit_pct: zero baseline");
  return (b - a) / a * 100.0;
}

MaxSpeedResult max_belt_speed(const ControllerFactory& make, const Pattern& pattern, const WorldConfig& cfg,
                              const MaxSpeedOptions& opts) {
  if (!(opts.lo > 0.0 && opts.lo < opts.hi) || !(opts.tol > 0.0))
    throw std::invalid_argument("max_belt_speed: need 0 < lo < hi and tol > 0");
  auto all_picked = [&](double v) {
    WorldConfig c = cfg;
    c.belt_speed = v;
    const auto res = run_episode(c, pattern, make(pattern, c), false);
    return res.stats.n_picked == res.stats.n_total;
  };

  MaxSpeedResult out;
  const std::size_t n = std::max<std::size_t>(opts.n_samples, 2);
  bool seen_infeasible = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = opts.lo + (opts.hi - opts.lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    const bool ok = all_picked(v);
    if (ok && seen_infeasible) out.monotone = false;
    seen_infeasible = seen_infeasible || !ok;
    out.samples.push_back({v, ok});
  }
  if (!out.samples.front().all_picked)
    throw NoFeasibleSpeed("objects are missed even at " + std::to_string(opts.lo) + " m/s");
  if (out.samples.back().all_picked) {
    out.speed = opts.hi;
    return out;
  }
  // Bracket from the scan: last feasible sample before the first infeasible one.
  double lo = opts.lo, hi = opts.hi;
  for (std::size_t i = 1; i < out.samples.size(); ++i) {
    if (!out.samples[i].all_picked) {
      lo = out.samples[i - 1].speed;
      hi = out.samples[i].speed;
      break;
    }
  }
  while (hi - lo > opts.tol) {
    const double mid = 0.5 * (lo + hi);
    (all_picked(mid) ? lo : hi) = mid;
  }
  out.speed = lo;
  return out;
}

std::vector<MetricRow> to_metric_rows(const std::vector<ComparisonRow>& rows) {
  std::vector<MetricRow> out;
  for (const auto& r : rows) {
    out.push_back({r.controller, r.pattern, "picked_pct", r.picked_pct});
    out.push_back({r.controller, r.pattern, "time_s", r.time_s});
    out.push_back({r.controller, r.pattern, "picks_per_min", r.picks_per_min});
  }
  return out;
}

std::vector<ComparisonRow> from_metric_rows(const std::vector<MetricRow>& rows) {
  std::vector<ComparisonRow> out;
  for (const auto& m : rows) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const ComparisonRow& r) { return r.controller == m.controller && r.pattern == m.pattern; });
    if (it == out.end()) {
      out.push_back({m.controller, m.pattern});
      it = std::prev(out.end());
    }
    if (m.metric == "picked_pct") it->picked_pct = m.value;
    else if (m.metric == "time_s") it->time_s = m.value;
    else if (m.metric == "picks_per_min") it->picks_per_min = m.value;
  }
  return out;
}

namespace {

constexpr const char* kHeader = "controller,pattern,metric,value";

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw std::runtime_error("csv: unterminated quote");
  return fields;
}

}  // namespace

void export_plot_data(const std::vector<MetricRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kHeader << '\n';
  for (const auto& r : rows) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, r.value);
    out << csv_field(r.controller) << ',' << csv_field(r.pattern) << ',' << csv_field(r.metric) << ','
        << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<MetricRow> load_plot_data(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw std::runtime_error("csv: bad header in " + path.string());
  std::vector<MetricRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 4) throw std::runtime_error("csv: expected 4 fields: " + line);
    MetricRow r{f[0], f[1], f[2], 0.0};
    const auto res = std::from_chars(f[3].data(), f[3].data() + f[3].size(), r.value);
    if (res.ec != std::errc{} || res.ptr != f[3].data() + f[3].size())
      throw std::runtime_error("csv: bad value '" + f[3] + "'");
    rows.push_back(std::move(r));
  }
  return rows;
}

ControllerFactory controller_by_name(const std::string& name, const StrategyCombo& robust) {
  if (name == "robust-gt") {
    return [robust](const Pattern&, const WorldConfig&) { return rule_controller(robust); };
  }
  if (name == "greedy-gt") {
    return [](const Pattern& p, const WorldConfig& cfg) { return rule_controller(greedy_gt(p, cfg).best); };
  }
  if (name.rfind("bridge:", 0) == 0) {
    const Endpoint ep = parse_endpoint(name.substr(7));
    return [ep](const Pattern&, const WorldConfig& cfg) { return remote_controller(ep, cfg); };
  }
  const StrategyCombo combo = combo_from(name);
  return [combo](const Pattern&, const WorldConfig&) { return rule_controller(combo); };
}

}  // namespace conveyor
