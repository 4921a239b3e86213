#include "conveyor/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace conveyor {

namespace {

// Portable uniform draw in [0, 1); std::uniform_real_distribution is not
// specified bit-for-bit across standard libraries.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
double uniform(std::mt19937_64& rng, Range r) { return r.lo + (r.hi - r.lo) * unit(rng); }

struct Point {
  double x;
  double y;
};

void fill_attributes(std::vector<Point> points, const PatternSpec& spec, std::mt19937_64& rng, Pattern& out) {
  std::stable_sort(points.begin(), points.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
  const double shift = points.empty() ? 0.0 : points.front().x;
  out.objects.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    PatternObject o;
    o.id = static_cast<std::uint32_t>(i);
    o.x = points[i].x - shift;
    o.y = points[i].y;
    o.area_cm2 = uniform(rng, spec.area_cm2);
    o.p_detection = uniform(rng, spec.p_detection);
    o.p_grasp = uniform(rng, spec.p_grasp);
    out.objects.push_back(o);
  }
}

bool in_unit_interval(Range r) { return r.lo >= 0 && r.hi <= 1 && r.lo <= r.hi; }

}  // namespace

std::string to_string(PatternKind kind) {
  return kind == PatternKind::grid ? "grid" : "poisson";
}

PatternKind pattern_kind_from(const std::string& name) {
  if (name == "grid") return PatternKind::grid;
  if (name == "poisson" || name == "poisson_disk") return PatternKind::poisson_disk;
  throw PatternError("unknown pattern kind '" + name + "'");
}

void check_spec(const PatternSpec& spec) {
  if (!(spec.param > 0)) throw PatternError("pattern spec: r/s must be > 0");
  if (!(spec.region_length > 0)) throw PatternError("pattern spec: region_length must be > 0");
  if (!(spec.belt_width > 0)) throw PatternError("pattern spec: belt_width must be > 0");
  if (!(spec.area_cm2.lo >= 0 && spec.area_cm2.lo <= spec.area_cm2.hi))
    throw PatternError("pattern spec: bad area range");
  if (!in_unit_interval(spec.p_detection) || !in_unit_interval(spec.p_grasp))
    throw PatternError("pattern spec: probability range outside [0,1]");
  if (!(spec.grid_jitter >= 0)) throw PatternError("pattern spec: jitter must be >= 0");
  if (spec.poisson_attempts < 1) throw PatternError("pattern spec: attempts must be >= 1");
}

Pattern sample_poisson_disk(const PatternSpec& spec) {
  check_spec(spec);
  std::mt19937_64 rng(spec.seed);
  const double r = spec.param;
  const double len = spec.region_length;
  const double half = 0.5 * spec.belt_width;
  const double cell = r / std::numbers::sqrt2;
  const int gw = std::max(1, static_cast<int>(std::ceil(len / cell)));
  const int gh = std::max(1, static_cast<int>(std::ceil(spec.belt_width / cell)));
  std::vector<int> grid(static_cast<std::size_t>(gw) * static_cast<std::size_t>(gh), -1);
  std::vector<Point> samples;
  std::vector<int> active;

  auto cell_of = [&](const Point& p) {
    const int gx = std::clamp(static_cast<int>(p.x / cell), 0, gw - 1);
    const int gy = std::clamp(static_cast<int>((p.y + half) / cell), 0, gh - 1);
    return std::pair{gx, gy};
  };
  auto fits = [&](const Point& p) {
    if (p.x < 0 || p.x > len || p.y < -half || p.y > half) return false;
    const auto [gx, gy] = cell_of(p);
    for (int y = std::max(0, gy - 2); y <= std::min(gh - 1, gy + 2); ++y) {
      for (int x = std::max(0, gx - 2); x <= std::min(gw - 1, gx + 2); ++x) {
        const int idx = grid[static_cast<std::size_t>(y) * gw + x];
        if (idx < 0) continue;
        const double dx = samples[idx].x - p.x, dy = samples[idx].y - p.y;
        if (dx * dx + dy * dy < r * r) return false;
      }
    }
    return true;
  };
  auto insert = [&](const Point& p) {
    samples.push_back(p);
    const auto [gx, gy] = cell_of(p);
    grid[static_cast<std::size_t>(gy) * gw + gx] = static_cast<int>(samples.size() - 1);
    active.push_back(static_cast<int>(samples.size() - 1));
  };

  insert({len * unit(rng), -half + spec.belt_width * unit(rng)});
  while (!active.empty()) {
    const auto slot = static_cast<std::size_t>(unit(rng) * static_cast<double>(active.size()));
    const Point base = samples[active[slot]];
    bool found = false;
    for (int k = 0; k < spec.poisson_attempts; ++k) {
      const double angle = 2.0 * std::numbers::pi * unit(rng);
      const double rad = r * (1.0 + unit(rng));
      const Point c{base.x + rad * std::cos(angle), base.y + rad * std::sin(angle)};
      if (fits(c)) {
        insert(c);
        found = true;
        break;
      }
    }
    if (!found) {
      active[slot] = active.back();
      active.pop_back();
    }
  }

  Pattern out;
  out.belt_width = spec.belt_width;
  fill_attributes(std::move(samples), spec, rng, out);
  return out;
}

Pattern sample_grid(const PatternSpec& spec) {
  check_spec(spec);
  std::mt19937_64 rng(spec.seed);
  const double s = spec.param;
  const double half = 0.5 * spec.belt_width;
  const auto lanes = static_cast<int>(std::floor(spec.belt_width / s + 1e-9)) + 1;
  const auto rows = static_cast<int>(std::floor(spec.region_length / s + 1e-9)) + 1;
  const double y0 = -0.5 * s * (lanes - 1);

  std::vector<Point> points;
  points.reserve(static_cast<std::size_t>(lanes) * rows);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < lanes; ++j) {
      Point p{s * i, std::clamp(y0 + s * j, -half, half)};
      if (spec.grid_jitter > 0) {
        p.x += spec.grid_jitter * (2.0 * unit(rng) - 1.0);
        p.y = std::clamp(p.y + spec.grid_jitter * (2.0 * unit(rng) - 1.0), -half, half);
      }
      points.push_back(p);
    }
  }
  Pattern out;
  out.belt_width = spec.belt_width;
  fill_attributes(std::move(points), spec, rng, out);
  return out;
}

Pattern sample_pattern(const PatternSpec& spec) {
  return spec.kind == PatternKind::grid ? sample_grid(spec) : sample_poisson_disk(spec);
}

std::string pattern_to_json(const Pattern& p) {
  nlohmann::ordered_json j;
  j["belt_width"] = p.belt_width;
  auto objects = nlohmann::ordered_json::array();
  for (const auto& o : p.objects) {
    nlohmann::ordered_json oj;
    oj["id"] = o.id;
    oj["x"] = o.x;
    oj["y"] = o.y;
    oj["area_cm2"] = o.area_cm2;
    oj["p_detection"] = o.p_detection;
    oj["p_grasp"] = o.p_grasp;
    objects.push_back(std::move(oj));
  }
  j["objects"] = std::move(objects);
  return j.dump();
}

namespace {

double number_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw PatternError(std::string("pattern schema: missing or non-numeric '") + key + "'");
  return j.at(key).get<double>();
}

}  // namespace

Pattern pattern_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw PatternError(std::string("malformed pattern file: ") + e.what());
  }
  if (!j.is_object()) throw PatternError("pattern schema: top level must be an object");
  Pattern p;
  p.belt_width = number_field(j, "belt_width");
  if (!(p.belt_width > 0)) throw PatternError("pattern schema: belt_width must be > 0");
  if (!j.contains("objects") || !j.at("objects").is_array())
    throw PatternError("pattern schema: 'objects' must be an array");
  std::set<std::uint32_t> seen;
  for (const auto& oj : j.at("objects")) {
    if (!oj.is_object()) throw PatternError("pattern schema: object entries must be objects");
    if (!oj.contains("id") || !oj.at("id").is_number_unsigned())
      throw PatternError("pattern schema: 'id' must be a non-negative integer");
    PatternObject o;
    o.id = oj.at("id").get<std::uint32_t>();
    o.x = number_field(oj, "x");
    o.y = number_field(oj, "y");
    o.area_cm2 = number_field(oj, "area_cm2");
    o.p_detection = number_field(oj, "p_detection");
    o.p_grasp = number_field(oj, "p_grasp");
    if (!(o.area_cm2 >= 0)) throw PatternError("pattern schema: area_cm2 must be >= 0");
    if (!(o.p_detection >= 0 && o.p_detection <= 1))
      throw PatternError("pattern schema: p_detection outside [0,1]");
    if (!(o.p_grasp >= 0 && o.p_grasp <= 1)) throw PatternError("pattern schema: p_grasp outside [0,1]");
    if (!seen.insert(o.id).second) throw PatternError("pattern schema: duplicate id " + std::to_string(o.id));
    p.objects.push_back(o);
  }
  return p;
}

Pattern load_pattern(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PatternError("cannot open pattern " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return pattern_from_json(ss.str());
}

void save_pattern(const Pattern& p, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw PatternError("cannot write pattern " + path.string());
  out << pattern_to_json(p) << '\n';
}

}  // namespace conveyor
