#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "conveyor/episode.hpp"
#include "conveyor/presets.hpp"
#include "conveyor/rules.hpp"

namespace conveyor {

/// Builds a controller for one pattern; greedy controllers need to see it.
using ControllerFactory = std::function<Controller(const Pattern&, const WorldConfig&)>;

struct NamedController {
  std::string name;
  ControllerFactory make;
};

struct NamedPattern {
  std::string name;
  Pattern pattern;
};

struct ComparisonRow {
  std::string controller;
  std::string pattern;
  double picked_pct = 0.0;
  double time_s = 0.0;
  double picks_per_min = 0.0;

  friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

/// Runs every (controller, pattern) episode; rows are pattern-major.
std::vector<ComparisonRow> compare(const std::vector<NamedController>& controllers,
                                   const std::vector<NamedPattern>& patterns, const WorldConfig& cfg);

/// Relative gain of `b` over `a` in percent.
double benefit_pct(double a, double b);

/// One sample of the feasibility scan.
struct SpeedSample {
  double speed = 0.0;
  bool all_picked = false;
};

struct MaxSpeedResult {
  double speed = 0.0;
  std::vector<SpeedSample> samples;  // evenly spaced over [lo, hi]
  bool monotone = true;              // no feasible sample above an infeasible one
};

struct MaxSpeedOptions {
  double lo = 0.01;
  double hi = 0.20;
  double tol = 0.001;
  std::size_t n_samples = 10;
};

class NoFeasibleSpeed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest belt speed at which `make` picks every object of `pattern`,
/// by bisection after a monotonicity scan. Throws NoFeasibleSpeed if even
/// `lo` misses objects.
MaxSpeedResult max_belt_speed(const ControllerFactory& make, const Pattern& pattern, const WorldConfig& cfg,
                              const MaxSpeedOptions& opts = {});

/// Long-form table: one row per (controller, pattern, metric).
struct MetricRow {
  std::string controller;
  std::string pattern;
  std::string metric;
  double value = 0.0;

  friend bool operator==(const MetricRow&, const MetricRow&) = default;
};

std::vector<MetricRow> to_metric_rows(const std::vector<ComparisonRow>& rows);
std::vector<ComparisonRow> from_metric_rows(const std::vector<MetricRow>& rows);

/// CSV with header controller,pattern,metric,value; values round-trip.
void export_plot_data(const std::vector<MetricRow>& rows, const std::filesystem::path& path);
std::vector<MetricRow> load_plot_data(const std::filesystem::path& path);

/// Controllers by name: a rule combo ("SPT,FIFO"), "robust-gt" (the given
/// combo), "greedy-gt" (per-pattern enumeration) or "bridge:<host:port>".
ControllerFactory controller_by_name(const std::string& name, const StrategyCombo& robust);

}  // namespace conveyor
