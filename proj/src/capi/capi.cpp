#include "northpole/northpole.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include <json.hpp>

#include "backends/driver.hpp"
#include "harness/bench.hpp"
#include "harness/validator.hpp"
#include "refinement/checker.hpp"
#include "refinement/design_steps.hpp"
#include "refinement/parser.hpp"
#include "refinement/printer.hpp"
#include "trace/trace_event.hpp"

namespace bk = northpole::backends;
namespace hn = northpole::harness;
namespace rf = northpole::refine;

struct np_run_result {
  bk::RunStats stats;
  std::string json;
  std::string text;
};

struct np_violations {
  std::vector<hn::Violation> items;
  std::vector<std::string> texts;
  std::string json;
};

struct np_spec {
  rf::Spec spec;
  std::string printed;
};

struct np_check_report {
  rf::CheckReport report;
  std::string json;
  std::string text;
};

struct np_bench_report {
  hn::BenchReport report;
  std::string json;
};

namespace {

thread_local std::string g_last_error;

np_status fail(np_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Maps exceptions escaping the core onto status codes.
template <typename F>
np_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return NP_OK;
  } catch (const rf::SpecError& e) {
    return fail(NP_ERR_PARSE, e.what());
  } catch (const rf::StructuralError& e) {
    return fail(NP_ERR_STRUCTURAL, e.what());
  } catch (const northpole::trace::TraceFormatError& e) {
    return fail(NP_ERR_TRACE_FORMAT, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(NP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(NP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const northpole::runtime::RuntimeError& e) {
    return fail(NP_ERR_RUNTIME, e.what());
  } catch (const std::exception& e) {
    return fail(NP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(NP_ERR_INTERNAL, "unknown error");
  }
}

northpole::santa::ScenarioConfig to_core(const np_scenario_config& c) {
  northpole::santa::ScenarioConfig cfg;
  cfg.reindeer_count = c.reindeer_count;
  cfg.elf_count = c.elf_count;
  cfg.barrier_size = c.barrier_size;
  cfg.group_size = c.group_size;
  cfg.santa_rounds = c.santa_rounds;
  if (c.reindeer_cycles >= 0) cfg.reindeer_cycles = static_cast<std::uint64_t>(c.reindeer_cycles);
  if (c.elf_cycles >= 0) cfg.elf_cycles = static_cast<std::uint64_t>(c.elf_cycles);
  return cfg;
}

bk::DriverOptions to_core(const np_run_options* o) {
  bk::DriverOptions opts;
  if (!o) return opts;
  if (o->worker_count) opts.worker_count = o->worker_count;
  opts.wakeup_policy = o->lifo_wakeup ? northpole::runtime::WakeupPolicy::Lifo : northpole::runtime::WakeupPolicy::Fifo;
  if (o->deadlock_poll_ms) opts.deadlock_poll_interval = std::chrono::milliseconds(o->deadlock_poll_ms);
  return opts;
}

bk::Backend to_core(np_backend b) {
  switch (b) {
    case NP_BACKEND_GUARDS: return bk::Backend::Guards;
    case NP_BACKEND_SEMAPHORES: return bk::Backend::Semaphores;
    case NP_BACKEND_CHANNELS: return bk::Backend::Channels;
    case NP_BACKEND_MONITOR: return bk::Backend::Monitor;
  }
  throw std::invalid_argument("unknown backend " + std::to_string(static_cast<int>(b)));
}

np_check_report* wrap(rf::CheckReport r) {
  auto* out = new np_check_report{std::move(r), {}, {}};
  out->json = out->report.to_json().dump(2);
  out->text = out->report.to_text();
  return out;
}

}  // namespace

extern "C" {

const char* np_last_error(void) { return g_last_error.c_str(); }

const char* np_status_string(np_status status) {
  switch (status) {
    case NP_OK: return "ok";
    case NP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case NP_ERR_PARSE: return "parse error";
    case NP_ERR_STRUCTURAL: return "structural error";
    case NP_ERR_IO: return "i/o error";
    case NP_ERR_TRACE_FORMAT: return "malformed trace";
    case NP_ERR_RUNTIME: return "runtime error";
    case NP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* np_backend_name(np_backend backend) {
  try {
    return bk::to_string(to_core(backend));
  } catch (...) {
    return "unknown";
  }
}

int np_backend_parse(const char* name, np_backend* out) {
  if (!name || !out) return -1;
  auto b = bk::parse_backend(name);
  if (!b) return -1;
  *out = static_cast<np_backend>(static_cast<int>(*b));
  return 0;
}

void np_scenario_config_default(np_scenario_config* cfg) {
  if (!cfg) return;
  northpole::santa::ScenarioConfig d;
  cfg->reindeer_count = d.reindeer_count;
  cfg->elf_count = d.elf_count;
  cfg->barrier_size = d.barrier_size;
  cfg->group_size = d.group_size;
  cfg->santa_rounds = d.santa_rounds;
  cfg->reindeer_cycles = -1;
  cfg->elf_cycles = -1;
}

void np_run_options_default(np_run_options* opts) {
  if (!opts) return;
  bk::DriverOptions d;
  opts->worker_count = d.worker_count;
  opts->lifo_wakeup = 0;
  opts->deadlock_poll_ms = static_cast<uint32_t>(d.deadlock_poll_interval.count());
}

np_status np_run_scenario(np_backend backend, const np_scenario_config* cfg, const np_run_options* opts,
                          const char* trace_path, np_run_result** out) {
  if (!cfg || !out) return fail(NP_ERR_INVALID_ARGUMENT, "cfg and out must not be null");
  *out = nullptr;
  std::ofstream file;
  if (trace_path) {
    file.open(trace_path, std::ios::out | std::ios::trunc);
    if (!file) return fail(NP_ERR_IO, std::string("cannot write trace file '") + trace_path + "'");
  }
  return guarded([&] {
    auto core = to_core(*cfg);
    core.validate();
    std::unique_ptr<northpole::trace::JsonlSink> sink;
    if (trace_path) sink = std::make_unique<northpole::trace::JsonlSink>(file);
    auto* r = new np_run_result{bk::run_backend(to_core(backend), core, sink.get(), to_core(opts)), {}, {}};
    r->json = bk::to_json(r->stats).dump(2);
    r->text = bk::to_text(r->stats);
    *out = r;
    if (trace_path) {
      file.flush();
      if (!file) throw std::runtime_error(std::string("failed writing trace file '") + trace_path + "'");
    }
  });
}

uint64_t np_run_deliveries(const np_run_result* r) { return r ? r->stats.deliveries : 0; }
uint64_t np_run_help_sessions(const np_run_result* r) { return r ? r->stats.help_sessions : 0; }
uint64_t np_run_rounds_completed(const np_run_result* r) { return r ? r->stats.santa_rounds_completed : 0; }
double np_run_wall_time(const np_run_result* r) { return r ? r->stats.wall_time_s : 0.0; }
int np_run_deadlocked(const np_run_result* r) { return r && r->stats.deadlocked() ? 1 : 0; }
const char* np_run_result_json(const np_run_result* r) { return r ? r->json.c_str() : ""; }
const char* np_run_result_text(const np_run_result* r) { return r ? r->text.c_str() : ""; }
void np_run_result_free(np_run_result* r) { delete r; }

np_status np_validate_trace_file(const char* path, uint64_t barrier_size, uint64_t group_size, const char* stats_json,
                                 np_violations** out) {
  if (!path || !out) return fail(NP_ERR_INVALID_ARGUMENT, "path and out must not be null");
  *out = nullptr;
  std::ifstream in(path);
  if (!in) return fail(NP_ERR_IO, std::string("cannot open trace file '") + path + "'");
  return guarded([&] {
    hn::ValidatorConfig cfg;
    cfg.barrier_size = barrier_size;
    cfg.group_size = group_size;
    if (cfg.barrier_size == 0 || cfg.group_size == 0) throw std::invalid_argument("barrier and group must be positive");
    std::optional<bk::RunStats> stats;
    if (stats_json) stats = bk::run_stats_from_json(nlohmann::json::parse(stats_json));
    auto* v = new np_violations{hn::validate_trace(in, cfg, stats ? &*stats : nullptr), {}, {}};
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& item : v->items) {
      v->texts.push_back(hn::to_string(item));
      arr.push_back({{"property", hn::to_string(item.property)},
                     {"first_seq", item.first_seq},
                     {"last_seq", item.last_seq},
                     {"description", item.description}});
    }
    v->json = arr.dump(2);
    *out = v;
  });
}

size_t np_violations_count(const np_violations* v) { return v ? v->items.size() : 0; }

const char* np_violation_text(const np_violations* v, size_t index) {
  if (!v || index >= v->texts.size()) return "";
  return v->texts[index].c_str();
}

const char* np_violations_json(const np_violations* v) { return v ? v->json.c_str() : "[]"; }
void np_violations_free(np_violations* v) { delete v; }

np_status np_spec_parse(const char* text, np_spec** out) {
  if (!text || !out) return fail(NP_ERR_INVALID_ARGUMENT, "text and out must not be null");
  *out = nullptr;
  return guarded([&] {
    auto* s = new np_spec{rf::parse_spec(text), {}};
    s->printed = rf::print_spec(s->spec);
    *out = s;
  });
}

np_status np_spec_load(const char* path, np_spec** out) {
  if (!path || !out) return fail(NP_ERR_INVALID_ARGUMENT, "path and out must not be null");
  *out = nullptr;
  std::ifstream in(path);
  if (!in) return fail(NP_ERR_IO, std::string("cannot open spec file '") + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return np_spec_parse(text.c_str(), out);
}

np_status np_spec_builtin(np_spec** out) {
  if (!out) return fail(NP_ERR_INVALID_ARGUMENT, "out must not be null");
  *out = nullptr;
  return guarded([&] {
    auto* s = new np_spec{rf::santa_steps_spec(), {}};
    s->printed = rf::print_spec(s->spec);
    *out = s;
  });
}

size_t np_spec_system_count(const np_spec* spec) { return spec ? spec->spec.systems.size() : 0; }
size_t np_spec_relation_count(const np_spec* spec) { return spec ? spec->spec.relations.size() : 0; }
const char* np_spec_print(const np_spec* spec) { return spec ? spec->printed.c_str() : ""; }
void np_spec_free(np_spec* spec) { delete spec; }

np_status np_refine_check(const np_spec* spec, const char* abstract_class, const char* concrete_class,
                          const char* relation, const char* mapping_json, np_scope scope, np_check_report** out) {
  if (!spec || !abstract_class || !concrete_class || !relation || !out) {
    return fail(NP_ERR_INVALID_ARGUMENT, "spec, class names, relation and out must not be null");
  }
  *out = nullptr;
  return guarded([&] {
    rf::RefinementMapping mapping;
    if (mapping_json) {
      try {
        mapping = rf::RefinementMapping::parse(mapping_json);
      } catch (const std::invalid_argument& e) {
        throw rf::StructuralError(e.what());
      }
    }
    rf::CheckOptions opts;
    opts.scope = scope == NP_SCOPE_ALL_PAIRS ? rf::Scope::AllPairs : rf::Scope::Reachable;
    *out = wrap(rf::check_class_refinement(spec->spec, abstract_class, concrete_class, relation, mapping, opts));
  });
}

size_t np_design_step_count(void) { return rf::design_steps().size(); }

np_status np_check_design_step(size_t step, np_check_report** out) {
  if (!out) return fail(NP_ERR_INVALID_ARGUMENT, "out must not be null");
  *out = nullptr;
  if (step < 1 || step > rf::design_steps().size()) {
    return fail(NP_ERR_INVALID_ARGUMENT, "step must be between 1 and " + std::to_string(rf::design_steps().size()));
  }
  return guarded([&] {
    const auto& s = rf::design_steps()[step - 1];
    *out = wrap(rf::check_class_refinement(rf::santa_steps_spec(), s.abstract_class, s.concrete_class, s.relation,
                                           s.mapping));
  });
}

int np_check_report_passed(const np_check_report* r) { return r && r->report.passed ? 1 : 0; }

int np_check_report_replay(const np_check_report* r) {
  if (!r || !r->report.counterexample) return -1;
  return rf::replay(*r->report.counterexample).reproduced ? 1 : 0;
}

const char* np_check_report_json(const np_check_report* r) { return r ? r->json.c_str() : ""; }
const char* np_check_report_text(const np_check_report* r) { return r ? r->text.c_str() : ""; }
void np_check_report_free(np_check_report* r) { delete r; }

np_status np_bench(np_backend backend, const np_scenario_config* base, const np_run_options* opts,
                   const uint64_t* levels, size_t level_count, size_t runs_per_level, np_bench_report** out) {
  if (!base || !out || (!levels && level_count)) return fail(NP_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    hn::BenchConfig cfg;
    cfg.backend = to_core(backend);
    cfg.base = to_core(*base);
    cfg.levels.assign(levels, levels + level_count);
    cfg.runs_per_level = runs_per_level;
    cfg.options = to_core(opts);
    auto* r = new np_bench_report{hn::run_benchmark(cfg), {}};
    r->json = hn::to_json(r->report).dump(2);
    *out = r;
  });
}

int np_bench_report_flagged(const np_bench_report* r) { return r && r->report.flagged ? 1 : 0; }

double np_bench_report_ratio(const np_bench_report* r, size_t index) {
  if (!r || index >= r->report.ratios.size() || !r->report.ratios[index]) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return *r->report.ratios[index];
}

double np_bench_report_median(const np_bench_report* r, size_t level) {
  if (!r || level >= r->report.levels.size() || !r->report.levels[level].median_wall_s) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return *r->report.levels[level].median_wall_s;
}

const char* np_bench_report_json(const np_bench_report* r) { return r ? r->json.c_str() : ""; }
void np_bench_report_free(np_bench_report* r) { delete r; }

}  // extern "C"
