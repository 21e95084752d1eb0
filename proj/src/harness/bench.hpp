#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "backends/driver.hpp"
#include "santa/santa_model.hpp"

namespace northpole::harness {

nlohmann::ordered_json to_json(const santa::ScenarioConfig& cfg);
santa::ScenarioConfig scenario_config_from_json(const nlohmann::json& j);

struct BenchConfig {
  backends::Backend backend = backends::Backend::Guards;
  // santa_rounds and reindeer_cycles are overridden per level.
  santa::ScenarioConfig base;
  std::vector<std::uint64_t> levels = {10000, 100000};
  std::size_t runs_per_level = 1;
  backends::DriverOptions options;
};

struct BenchLevel {
  std::uint64_t rounds = 0;
  std::uint64_t reindeer_cycles = 0;
  // Median over runs that did not deadlock; unset when all of them did.
  std::optional<double> median_wall_s;
  std::vector<double> run_wall_s;
  // Sample variance, only with more than one timed run.
  std::optional<double> variance;
  std::uint64_t deliveries = 0;
  std::uint64_t help_sessions = 0;
  std::size_t deadlocked_runs = 0;

  bool operator==(const BenchLevel&) const = default;
};

struct BenchReport {
  backends::Backend backend = backends::Backend::Guards;
  santa::ScenarioConfig cfg;
  std::size_t runs_per_level = 1;
  std::vector<BenchLevel> levels;
  // median[i+1] / median[i]; unset where either side has no timing.
  std::vector<std::optional<double>> ratios;
  bool flagged = false;  // some run deadlocked

  bool operator==(const BenchReport& other) const;
};

// Runs each level `runs_per_level` times with tracing off. Reindeer cycles
// are a fifth of the level's rounds, keeping deliveries at one in five.
// Throws std::invalid_argument unless levels are strictly increasing.
BenchReport run_benchmark(const BenchConfig& cfg);

nlohmann::ordered_json to_json(const BenchReport& report);
BenchReport bench_report_from_json(const nlohmann::json& j);

}  // namespace northpole::harness
