#ifndef NORTHPOLE_NORTHPOLE_H
#define NORTHPOLE_NORTHPOLE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(NORTHPOLE_BUILDING_LIBRARY)
#define NP_API __attribute__((visibility("default")))
#else
#define NP_API
#endif

typedef enum np_status {
  NP_OK = 0,
  NP_ERR_INVALID_ARGUMENT = 1,
  NP_ERR_PARSE = 2,      /* spec text; see np_last_error() for line:column */
  NP_ERR_STRUCTURAL = 3, /* systems, relation and mapping do not fit together */
  NP_ERR_IO = 4,
  NP_ERR_TRACE_FORMAT = 5,
  NP_ERR_RUNTIME = 6,
  NP_ERR_INTERNAL = 7
} np_status;

typedef enum np_backend {
  NP_BACKEND_GUARDS = 0,
  NP_BACKEND_SEMAPHORES = 1,
  NP_BACKEND_CHANNELS = 2,
  NP_BACKEND_MONITOR = 3
} np_backend;

typedef enum np_scope { NP_SCOPE_REACHABLE = 0, NP_SCOPE_ALL_PAIRS = 1 } np_scope;

/* Message for the last failing call on this thread; empty after success. */
NP_API const char* np_last_error(void);
NP_API const char* np_status_string(np_status status);
NP_API const char* np_backend_name(np_backend backend);
/* Returns 0 and sets *out for "guards", "semaphores", "channels", "monitor". */
NP_API int np_backend_parse(const char* name, np_backend* out);

/* ---- scenarios ---- */

typedef struct np_scenario_config {
  uint64_t reindeer_count;
  uint64_t elf_count;
  uint64_t barrier_size;
  uint64_t group_size;
  uint64_t santa_rounds;
  int64_t reindeer_cycles; /* negative: unbounded */
  int64_t elf_cycles;      /* negative: unbounded */
} np_scenario_config;

typedef struct np_run_options {
  uint64_t worker_count; /* guards backend only */
  int lifo_wakeup;       /* nonzero: wake the newest waiter first */
  uint32_t deadlock_poll_ms;
} np_run_options;

NP_API void np_scenario_config_default(np_scenario_config* cfg);
NP_API void np_run_options_default(np_run_options* opts);

typedef struct np_run_result np_run_result;

/* Runs to cfg->santa_rounds or deadlock. `trace_path` may be NULL; when set,
   every event is written there as one JSON object per line. `opts` may be
   NULL for defaults. */
NP_API np_status np_run_scenario(np_backend backend, const np_scenario_config* cfg, const np_run_options* opts,
                                 const char* trace_path, np_run_result** out);
NP_API uint64_t np_run_deliveries(const np_run_result* r);
NP_API uint64_t np_run_help_sessions(const np_run_result* r);
NP_API uint64_t np_run_rounds_completed(const np_run_result* r);
NP_API double np_run_wall_time(const np_run_result* r);
NP_API int np_run_deadlocked(const np_run_result* r);
/* Strings stay valid until the handle is freed. */
NP_API const char* np_run_result_json(const np_run_result* r);
NP_API const char* np_run_result_text(const np_run_result* r);
NP_API void np_run_result_free(np_run_result* r);

/* ---- trace validation ---- */

typedef struct np_violations np_violations;

/* `stats_json` (a run result as JSON, may be NULL) enables the count
   comparison against the run's statistics. Malformed traces fail with
   NP_ERR_TRACE_FORMAT. */
NP_API np_status np_validate_trace_file(const char* path, uint64_t barrier_size, uint64_t group_size,
                                        const char* stats_json, np_violations** out);
NP_API size_t np_violations_count(const np_violations* v);
NP_API const char* np_violation_text(const np_violations* v, size_t index);
NP_API const char* np_violations_json(const np_violations* v);
NP_API void np_violations_free(np_violations* v);

/* ---- refinement ---- */

typedef struct np_spec np_spec;
typedef struct np_check_report np_check_report;

NP_API np_status np_spec_parse(const char* text, np_spec** out);
NP_API np_status np_spec_load(const char* path, np_spec** out);
/* The compiled-in Santa steps: Santa0 .. Shop5 and R1 .. R5. */
NP_API np_status np_spec_builtin(np_spec** out);
NP_API size_t np_spec_system_count(const np_spec* spec);
NP_API size_t np_spec_relation_count(const np_spec* spec);
NP_API const char* np_spec_print(const np_spec* spec);
NP_API void np_spec_free(np_spec* spec);

/* `mapping_json` NULL searches for N/A choices; otherwise it pins them. */
NP_API np_status np_refine_check(const np_spec* spec, const char* abstract_class, const char* concrete_class,
                                 const char* relation, const char* mapping_json, np_scope scope,
                                 np_check_report** out);
NP_API size_t np_design_step_count(void);
/* step is 1-based. */
NP_API np_status np_check_design_step(size_t step, np_check_report** out);
NP_API int np_check_report_passed(const np_check_report* r);
/* 1: the counterexample reproduces, 0: it does not, -1: no counterexample. */
NP_API int np_check_report_replay(const np_check_report* r);
NP_API const char* np_check_report_json(const np_check_report* r);
NP_API const char* np_check_report_text(const np_check_report* r);
NP_API void np_check_report_free(np_check_report* r);

/* ---- benchmarks ---- */

typedef struct np_bench_report np_bench_report;

/* `levels` must be strictly increasing Santa round counts. Reindeer cycles
   are set to a fifth of each level. */
NP_API np_status np_bench(np_backend backend, const np_scenario_config* base, const np_run_options* opts,
                          const uint64_t* levels, size_t level_count, size_t runs_per_level,
                          np_bench_report** out);
NP_API int np_bench_report_flagged(const np_bench_report* r);
/* NaN when either level has no timing. */
NP_API double np_bench_report_ratio(const np_bench_report* r, size_t index);
NP_API double np_bench_report_median(const np_bench_report* r, size_t level);
NP_API const char* np_bench_report_json(const np_bench_report* r);
NP_API void np_bench_report_free(np_bench_report* r);

#ifdef __cplusplus
}
#endif

#endif /* NORTHPOLE_NORTHPOLE_H */
