#include "harness/bench.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace northpole::harness {

nlohmann::ordered_json to_json(const santa::ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  j["reindeer"] = cfg.reindeer_count;
  j["elves"] = cfg.elf_count;
  j["barrier"] = cfg.barrier_size;
  j["group"] = cfg.group_size;
  j["rounds"] = cfg.santa_rounds;
  j["reindeer_cycles"] = cfg.reindeer_cycles ? nlohmann::ordered_json(*cfg.reindeer_cycles) : nullptr;
  j["elf_cycles"] = cfg.elf_cycles ? nlohmann::ordered_json(*cfg.elf_cycles) : nullptr;
  return j;
}

santa::ScenarioConfig scenario_config_from_json(const nlohmann::json& j) {
  santa::ScenarioConfig cfg;
  cfg.reindeer_count = j.at("reindeer").get<std::size_t>();
  cfg.elf_count = j.at("elves").get<std::size_t>();
  cfg.barrier_size = j.at("barrier").get<std::size_t>();
  cfg.group_size = j.at("group").get<std::size_t>();
  cfg.santa_rounds = j.at("rounds").get<std::uint64_t>();
  if (j.contains("reindeer_cycles") && !j["reindeer_cycles"].is_null()) {
    cfg.reindeer_cycles = j["reindeer_cycles"].get<std::uint64_t>();
  }
  if (j.contains("elf_cycles") && !j["elf_cycles"].is_null()) cfg.elf_cycles = j["elf_cycles"].get<std::uint64_t>();
  return cfg;
}

namespace {

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

double sample_variance(const std::vector<double>& xs) {
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += (x - mean) * (x - mean);
  return sum / static_cast<double>(xs.size() - 1);
}

// Rounds and reindeer cycles are per level, so they are not part of the
// report's configuration.
bool same_cfg(const santa::ScenarioConfig& a, const santa::ScenarioConfig& b) {
  return a.reindeer_count == b.reindeer_count && a.elf_count == b.elf_count && a.barrier_size == b.barrier_size &&
         a.group_size == b.group_size && a.elf_cycles == b.elf_cycles;
}

}  // namespace

bool BenchReport::operator==(const BenchReport& o) const {
  return backend == o.backend && same_cfg(cfg, o.cfg) && runs_per_level == o.runs_per_level && levels == o.levels &&
         ratios == o.ratios && flagged == o.flagged;
}

BenchReport run_benchmark(const BenchConfig& bc) {
  if (bc.levels.empty()) throw std::invalid_argument("at least one repetition level is required");
  for (std::size_t i = 1; i < bc.levels.size(); ++i) {
    if (bc.levels[i] <= bc.levels[i - 1]) throw std::invalid_argument("repetition levels must be strictly increasing");
  }
  if (bc.runs_per_level == 0) throw std::invalid_argument("runs per level must be positive");

  BenchReport report;
  report.backend = bc.backend;
  report.cfg = bc.base;
  report.runs_per_level = bc.runs_per_level;
  for (std::uint64_t rounds : bc.levels) {
    santa::ScenarioConfig cfg = bc.base;
    cfg.santa_rounds = rounds;
    cfg.reindeer_cycles = std::max<std::uint64_t>(1, rounds / 5);
    BenchLevel level;
    level.rounds = rounds;
    level.reindeer_cycles = *cfg.reindeer_cycles;
    for (std::size_t r = 0; r < bc.runs_per_level; ++r) {
      const auto stats = backends::run_backend(bc.backend, cfg, nullptr, bc.options);
      level.deliveries = stats.deliveries;
      level.help_sessions = stats.help_sessions;
      if (stats.deadlocked()) {
        ++level.deadlocked_runs;
        report.flagged = true;
        continue;
      }
      level.run_wall_s.push_back(stats.wall_time_s);
    }
    if (!level.run_wall_s.empty()) level.median_wall_s = median(level.run_wall_s);
    if (level.run_wall_s.size() > 1) level.variance = sample_variance(level.run_wall_s);
    report.levels.push_back(std::move(level));
  }
  for (std::size_t i = 1; i < report.levels.size(); ++i) {
    const auto& a = report.levels[i - 1].median_wall_s;
    const auto& b = report.levels[i].median_wall_s;
    if (a && b && *a > 0.0) {
      report.ratios.push_back(*b / *a);
    } else {
      report.ratios.push_back(std::nullopt);
    }
  }
  return report;
}

nlohmann::ordered_json to_json(const BenchReport& r) {
  nlohmann::ordered_json j;
  j["backend"] = backends::to_string(r.backend);
  auto cfg = to_json(r.cfg);
  cfg.erase("rounds");
  cfg.erase("reindeer_cycles");
  j["cfg"] = cfg;
  j["runs_per_level"] = r.runs_per_level;
  nlohmann::ordered_json levels = nlohmann::ordered_json::array();
  for (const auto& l : r.levels) {
    nlohmann::ordered_json lj;
    lj["rounds"] = l.rounds;
    lj["reindeer_cycles"] = l.reindeer_cycles;
    lj["median_wall_s"] = l.median_wall_s ? nlohmann::ordered_json(*l.median_wall_s) : nullptr;
    lj["run_wall_s"] = l.run_wall_s;
    if (l.variance) lj["variance"] = *l.variance;
    lj["counts"] = {{"deliveries", l.deliveries}, {"help_sessions", l.help_sessions}};
    lj["deadlocked_runs"] = l.deadlocked_runs;
    levels.push_back(std::move(lj));
  }
  j["levels"] = std::move(levels);
  nlohmann::ordered_json ratios = nlohmann::ordered_json::array();
  for (const auto& x : r.ratios) ratios.push_back(x ? nlohmann::ordered_json(*x) : nullptr);
  j["ratios"] = std::move(ratios);
  j["flagged"] = r.flagged;
  return j;
}

BenchReport bench_report_from_json(const nlohmann::json& j) {
  BenchReport r;
  auto backend = backends::parse_backend(j.at("backend").get<std::string>());
  if (!backend) throw std::invalid_argument("unknown backend in bench report");
  r.backend = *backend;
  const auto& c = j.at("cfg");
  r.cfg.reindeer_count = c.at("reindeer").get<std::size_t>();
  r.cfg.elf_count = c.at("elves").get<std::size_t>();
  r.cfg.barrier_size = c.at("barrier").get<std::size_t>();
  r.cfg.group_size = c.at("group").get<std::size_t>();
  if (c.contains("elf_cycles") && !c["elf_cycles"].is_null()) r.cfg.elf_cycles = c["elf_cycles"].get<std::uint64_t>();
  r.runs_per_level = j.at("runs_per_level").get<std::size_t>();
  for (const auto& lj : j.at("levels")) {
    BenchLevel l;
    l.rounds = lj.at("rounds").get<std::uint64_t>();
    l.reindeer_cycles = lj.at("reindeer_cycles").get<std::uint64_t>();
    if (!lj.at("median_wall_s").is_null()) l.median_wall_s = lj["median_wall_s"].get<double>();
    l.run_wall_s = lj.at("run_wall_s").get<std::vector<double>>();
    if (lj.contains("variance")) l.variance = lj["variance"].get<double>();
    l.deliveries = lj.at("counts").at("deliveries").get<std::uint64_t>();
    l.help_sessions = lj.at("counts").at("help_sessions").get<std::uint64_t>();
    l.deadlocked_runs = lj.at("deadlocked_runs").get<std::size_t>();
    r.levels.push_back(std::move(l));
  }
  for (const auto& x : j.at("ratios")) {
    r.ratios.push_back(x.is_null() ? std::nullopt : std::optional<double>(x.get<double>()));
  }
  r.flagged = j.at("flagged").get<bool>();
  return r;
}

}  // namespace northpole::harness
