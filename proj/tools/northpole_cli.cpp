// Command-line front end: run, bench, validate, refine check.
//
// Exit codes: 0 success or Pass; 1 violations, Fail, deadlock or a flagged
// benchmark; 2 usage, parse or structural errors.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "northpole/northpole.h"

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct ScenarioFlags {
  std::string backend = "guards";
  np_scenario_config cfg{};
  int64_t reindeer_cycles = -1;
  int64_t elf_cycles = -1;
  uint64_t workers = 1;
  bool lifo = false;
  std::string report = "text";

  ScenarioFlags() { np_scenario_config_default(&cfg); }

  void add(CLI::App* cmd) {
    cmd->add_option("--backend", backend, "guards | semaphores | channels | monitor")
        ->check(CLI::IsMember({"guards", "semaphores", "channels", "monitor"}));
    cmd->add_option("--rounds", cfg.santa_rounds, "Santa's rounds to run");
    cmd->add_option("--reindeer", cfg.reindeer_count, "number of reindeer");
    cmd->add_option("--elves", cfg.elf_count, "number of elves");
    cmd->add_option("--reindeer-cycles", reindeer_cycles, "cycles per reindeer; negative for unbounded");
    cmd->add_option("--elf-cycles", elf_cycles, "cycles per elf; negative for unbounded");
    cmd->add_option("--barrier", cfg.barrier_size, "reindeer needed for a delivery");
    cmd->add_option("--group", cfg.group_size, "elves needed for a consultation");
    cmd->add_option("--workers", workers, "worker threads for the guards backend")->check(CLI::PositiveNumber);
    cmd->add_flag("--lifo", lifo, "wake the newest suspended caller first");
    cmd->add_option("--report", report, "json | text")->check(CLI::IsMember({"json", "text"}));
  }

  np_backend backend_id() const {
    np_backend b = NP_BACKEND_GUARDS;
    np_backend_parse(backend.c_str(), &b);
    return b;
  }

  np_run_options options() const {
    np_run_options o;
    np_run_options_default(&o);
    o.worker_count = workers;
    o.lifo_wakeup = lifo ? 1 : 0;
    return o;
  }

  np_scenario_config config() const {
    np_scenario_config c = cfg;
    c.reindeer_cycles = reindeer_cycles;
    c.elf_cycles = elf_cycles;
    return c;
  }
};

int error_exit(np_status st) {
  std::cerr << "error: " << np_status_string(st) << ": " << np_last_error() << "\n";
  switch (st) {
    case NP_ERR_RUNTIME:
    case NP_ERR_INTERNAL:
    case NP_ERR_IO:
      return kFail;
    default:
      return kUsage;
  }
}

int cmd_run(const ScenarioFlags& f, const std::string& trace) {
  np_scenario_config cfg = f.config();
  np_run_options opts = f.options();
  np_run_result* r = nullptr;
  np_status st = np_run_scenario(f.backend_id(), &cfg, &opts, trace.empty() ? nullptr : trace.c_str(), &r);
  if (st != NP_OK) return error_exit(st);
  if (f.report == "json") {
    std::cout << np_run_result_json(r) << "\n";
  } else {
    std::cout << np_run_result_text(r);
  }
  int code = np_run_deadlocked(r) ? kFail : kOk;
  np_run_result_free(r);
  return code;
}

int cmd_bench(const ScenarioFlags& f, const std::vector<uint64_t>& levels, std::size_t runs,
              const std::string& output) {
  np_scenario_config cfg = f.config();
  np_run_options opts = f.options();
  np_bench_report* r = nullptr;
  np_status st = np_bench(f.backend_id(), &cfg, &opts, levels.data(), levels.size(), runs, &r);
  if (st != NP_OK) return error_exit(st);
  std::string json = np_bench_report_json(r);
  if (!output.empty()) {
    std::ofstream out(output);
    out << json << "\n";
    if (!out) {
      std::cerr << "error: cannot write '" << output << "'\n";
      np_bench_report_free(r);
      return kFail;
    }
  }
  if (f.report == "json") {
    std::cout << json << "\n";
  } else {
    std::cout << "backend " << f.backend << "\n";
    for (std::size_t i = 0; i < levels.size(); ++i) {
      double m = np_bench_report_median(r, i);
      std::cout << "  rounds " << levels[i] << ": median ";
      if (std::isnan(m)) {
        std::cout << "n/a";
      } else {
        std::cout << m << " s";
      }
      std::cout << "\n";
      if (i > 0) {
        double ratio = np_bench_report_ratio(r, i - 1);
        if (!std::isnan(ratio)) std::cout << "    ratio to previous level: " << ratio << "\n";
      }
    }
    if (np_bench_report_flagged(r)) std::cout << "  flagged: some run deadlocked\n";
  }
  int code = np_bench_report_flagged(r) ? kFail : kOk;
  np_bench_report_free(r);
  return code;
}

int cmd_validate(const std::string& path, uint64_t barrier, uint64_t group, const std::string& stats_path,
                 const std::string& report) {
  std::string stats;
  if (!stats_path.empty()) {
    std::ifstream in(stats_path);
    if (!in) {
      std::cerr << "error: cannot open '" << stats_path << "'\n";
      return kUsage;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    stats = buf.str();
  }
  np_violations* v = nullptr;
  np_status st = np_validate_trace_file(path.c_str(), barrier, group, stats.empty() ? nullptr : stats.c_str(), &v);
  if (st != NP_OK) return st == NP_ERR_IO ? (error_exit(st), kUsage) : error_exit(st);
  std::size_t n = np_violations_count(v);
  if (report == "json") {
    std::cout << np_violations_json(v) << "\n";
  } else {
    for (std::size_t i = 0; i < n; ++i) std::cout << np_violation_text(v, i) << "\n";
    std::cout << (n == 0 ? "no violations" : std::to_string(n) + " violation(s)") << "\n";
  }
  np_violations_free(v);
  return n == 0 ? kOk : kFail;
}

int cmd_refine_check(const std::string& file, const std::string& abs, const std::string& conc,
                     const std::string& rel, const std::string& mapping_path, const std::string& scope,
                     const std::string& report) {
  np_spec* spec = nullptr;
  np_status st = np_spec_load(file.c_str(), &spec);
  if (st != NP_OK) return st == NP_ERR_IO ? (error_exit(st), kUsage) : error_exit(st);
  std::string mapping;
  if (!mapping_path.empty()) {
    std::ifstream in(mapping_path);
    if (!in) {
      std::cerr << "error: cannot open mapping file '" << mapping_path << "'\n";
      np_spec_free(spec);
      return kUsage;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    mapping = buf.str();
  }
  np_check_report* r = nullptr;
  st = np_refine_check(spec, abs.c_str(), conc.c_str(), rel.c_str(), mapping_path.empty() ? nullptr : mapping.c_str(),
                       scope == "all-pairs" ? NP_SCOPE_ALL_PAIRS : NP_SCOPE_REACHABLE, &r);
  np_spec_free(spec);
  if (st != NP_OK) return error_exit(st);
  std::cout << (report == "json" ? np_check_report_json(r) : np_check_report_text(r));
  if (report == "json") std::cout << "\n";
  int code = np_check_report_passed(r) ? kOk : kFail;
  np_check_report_free(r);
  return code;
}

int cmd_refine_steps(const std::string& report) {
  int code = kOk;
  for (std::size_t i = 1; i <= np_design_step_count(); ++i) {
    np_check_report* r = nullptr;
    np_status st = np_check_design_step(i, &r);
    if (st != NP_OK) return error_exit(st);
    std::cout << (report == "json" ? np_check_report_json(r) : np_check_report_text(r)) << "\n";
    if (!np_check_report_passed(r)) code = kFail;
    np_check_report_free(r);
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"North Pole: guarded-command runtime, Santa Claus scenario, backends and refinement checker"};
  app.require_subcommand(1);

  ScenarioFlags run_flags;
  std::string trace;
  auto* run = app.add_subcommand("run", "run the scenario once and print its statistics");
  run_flags.add(run);
  run->add_option("--trace", trace, "write events as JSON lines to this file");

  ScenarioFlags bench_flags;
  std::vector<uint64_t> levels = {10000, 100000};
  std::size_t runs = 1;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "time the scenario at increasing round counts");
  bench_flags.add(bench);
  bench->add_option("--levels", levels, "strictly increasing round counts, comma separated")->delimiter(',');
  bench->add_option("--runs", runs, "runs per level")->check(CLI::PositiveNumber);
  bench->add_option("--output", bench_out, "also write the JSON report to this file");

  std::string trace_in;
  uint64_t barrier = 9;
  uint64_t group = 3;
  std::string stats_path;
  std::string validate_report = "text";
  auto* validate = app.add_subcommand("validate", "check a recorded trace for P1-P4");
  validate->add_option("trace", trace_in, "JSON-lines trace")->required();
  validate->add_option("--barrier", barrier, "reindeer per delivery");
  validate->add_option("--group", group, "elves per consultation");
  validate->add_option("--stats", stats_path, "run statistics (run --report json) to compare counts with");
  validate->add_option("--report", validate_report, "json | text")->check(CLI::IsMember({"json", "text"}));

  auto* refine = app.add_subcommand("refine", "refinement checking");
  refine->require_subcommand(1);
  std::string spec_file;
  std::string abs_name;
  std::string conc_name;
  std::string rel_name;
  std::string mapping_path;
  std::string scope = "reachable";
  std::string refine_report = "text";
  auto* check = refine->add_subcommand("check", "check that one class refines another");
  check->add_option("file", spec_file, ".gts file")->required();
  check->add_option("--abstract", abs_name, "abstract class")->required();
  check->add_option("--concrete", conc_name, "concrete class")->required();
  check->add_option("--relation", rel_name, "coupling relation")->required();
  check->add_option("--explicit", mapping_path, "JSON file pinning the N/A choices");
  check->add_option("--scope", scope, "reachable | all-pairs")->check(CLI::IsMember({"reachable", "all-pairs"}));
  check->add_option("--report", refine_report, "json | text")->check(CLI::IsMember({"json", "text"}));
  std::string steps_report = "text";
  auto* steps = refine->add_subcommand("steps", "check the five built-in Santa refinement steps");
  steps->add_option("--report", steps_report, "json | text")->check(CLI::IsMember({"json", "text"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsage;
  }

  if (run->parsed()) return cmd_run(run_flags, trace);
  if (bench->parsed()) return cmd_bench(bench_flags, levels, runs, bench_out);
  if (validate->parsed()) return cmd_validate(trace_in, barrier, group, stats_path, validate_report);
  if (check->parsed()) {
    return cmd_refine_check(spec_file, abs_name, conc_name, rel_name, mapping_path, scope, refine_report);
  }
  if (steps->parsed()) return cmd_refine_steps(steps_report);
  std::cerr << app.help();
  return kUsage;
}
