/* Exercises the shared library through its C header only. */

#include <math.h>
#include <stdio.h>
#include <string.h>

#include <northpole/northpole.h>

static int failures = 0;

#define CHECK(cond)                                                  \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: CHECK(%s) failed\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                    \
    }                                                                \
  } while (0)

static void test_names(void) {
  np_backend b;
  CHECK(np_backend_parse("monitor", &b) == 0 && b == NP_BACKEND_MONITOR);
  CHECK(np_backend_parse("actors", &b) != 0);
  CHECK(strcmp(np_backend_name(NP_BACKEND_CHANNELS), "channels") == 0);
  CHECK(strlen(np_status_string(NP_ERR_PARSE)) > 0);
}

static void test_run_and_validate(void) {
  np_scenario_config cfg;
  np_scenario_config_default(&cfg);
  CHECK(cfg.reindeer_count == 9 && cfg.elf_count == 20 && cfg.barrier_size == 9 && cfg.group_size == 3);
  cfg.santa_rounds = 100;
  cfg.reindeer_cycles = 20;

  const char* path = NORTHPOLE_TEST_DIR "/capi_trace.jsonl";
  np_run_result* r = NULL;
  CHECK(np_run_scenario(NP_BACKEND_GUARDS, &cfg, NULL, path, &r) == NP_OK);
  CHECK(r != NULL);
  CHECK(np_run_deliveries(r) == 20);
  CHECK(np_run_help_sessions(r) == 80);
  CHECK(np_run_rounds_completed(r) == 100);
  CHECK(!np_run_deadlocked(r));
  CHECK(np_run_wall_time(r) >= 0.0);
  CHECK(strstr(np_run_result_json(r), "\"deliveries\": 20") != NULL);
  CHECK(strstr(np_run_result_text(r), "deliveries=20") != NULL);

  np_violations* v = NULL;
  CHECK(np_validate_trace_file(path, 9, 3, np_run_result_json(r), &v) == NP_OK);
  CHECK(np_violations_count(v) == 0);
  CHECK(strcmp(np_violations_json(v), "[]") == 0);
  np_violations_free(v);

  /* Wrong group size: the validator finds violations. */
  v = NULL;
  CHECK(np_validate_trace_file(path, 9, 2, NULL, &v) == NP_OK);
  CHECK(np_violations_count(v) > 0);
  CHECK(np_violation_text(v, 0) != NULL && strlen(np_violation_text(v, 0)) > 0);
  np_violations_free(v);
  np_run_result_free(r);

  v = NULL;
  CHECK(np_validate_trace_file(NORTHPOLE_TEST_DIR "/no_such_trace.jsonl", 9, 3, NULL, &v) != NP_OK);
  CHECK(v == NULL);
  CHECK(strlen(np_last_error()) > 0);
}

static void test_deadlock_and_errors(void) {
  np_scenario_config cfg;
  np_scenario_config_default(&cfg);
  cfg.reindeer_count = 8;
  cfg.elf_count = 0;
  cfg.santa_rounds = 5;
  np_run_result* r = NULL;
  CHECK(np_run_scenario(NP_BACKEND_SEMAPHORES, &cfg, NULL, NULL, &r) == NP_OK);
  CHECK(np_run_deadlocked(r));
  CHECK(np_run_deliveries(r) == 0);
  np_run_result_free(r);

  cfg.barrier_size = 0;
  r = NULL;
  CHECK(np_run_scenario(NP_BACKEND_GUARDS, &cfg, NULL, NULL, &r) == NP_ERR_INVALID_ARGUMENT);
  CHECK(r == NULL);
  CHECK(strstr(np_last_error(), "barrier") != NULL);
  CHECK(np_run_scenario(NP_BACKEND_GUARDS, NULL, NULL, NULL, &r) == NP_ERR_INVALID_ARGUMENT);
}

static void test_refinement(void) {
  CHECK(np_design_step_count() == 5);
  for (size_t i = 1; i <= np_design_step_count(); ++i) {
    np_check_report* rep = NULL;
    CHECK(np_check_design_step(i, &rep) == NP_OK);
    CHECK(np_check_report_passed(rep) == 1);
    CHECK(np_check_report_replay(rep) == -1);
    CHECK(strstr(np_check_report_json(rep), "\"verdict\": \"pass\"") != NULL);
    np_check_report_free(rep);
  }
  np_check_report* rep = NULL;
  CHECK(np_check_design_step(6, &rep) == NP_ERR_INVALID_ARGUMENT);

  np_spec* spec = NULL;
  CHECK(np_spec_builtin(&spec) == NP_OK);
  CHECK(np_spec_system_count(spec) >= 8);
  CHECK(np_spec_relation_count(spec) == 5);

  /* AllPairs rejects step 2, and the counterexample replays. */
  CHECK(np_refine_check(spec, "Santa1", "Santa2", "R2", NULL, NP_SCOPE_ALL_PAIRS, &rep) == NP_OK);
  CHECK(np_check_report_passed(rep) == 0);
  CHECK(np_check_report_replay(rep) == 1);
  CHECK(strstr(np_check_report_text(rep), "FAIL") != NULL);
  np_check_report_free(rep);

  const char* mapping = "{\"actions\": {\"A1\": \"A1\", \"A2\": \"A1\", \"A3\": \"A2\", \"A4\": \"A2\"}}";
  CHECK(np_refine_check(spec, "Santa0", "Santa1", "R1", mapping, NP_SCOPE_REACHABLE, &rep) == NP_OK);
  CHECK(np_check_report_passed(rep) == 1);
  np_check_report_free(rep);

  rep = NULL;
  CHECK(np_refine_check(spec, "Santa0", "Nobody", "R1", NULL, NP_SCOPE_REACHABLE, &rep) == NP_ERR_STRUCTURAL);
  CHECK(rep == NULL);
  np_spec_free(spec);

  spec = NULL;
  CHECK(np_spec_parse("class A\n  var x: 0 .. 1 = 2\n", &spec) == NP_ERR_PARSE);
  CHECK(spec == NULL);
  CHECK(strstr(np_last_error(), "2:") != NULL);

  CHECK(np_spec_parse("class A\n  var x: 0 .. 1 = 0\n  action x = 0 -> x := 1\n", &spec) == NP_OK);
  CHECK(np_spec_system_count(spec) == 1);
  CHECK(strstr(np_spec_print(spec), "class A") != NULL);
  np_spec_free(spec);

  CHECK(np_spec_load(NORTHPOLE_SOURCE_DIR "/data/santa0.gts", &spec) == NP_OK);
  CHECK(np_spec_system_count(spec) == 1);
  np_spec_free(spec);
  CHECK(np_spec_load(NORTHPOLE_SOURCE_DIR "/data/missing.gts", &spec) == NP_ERR_IO);
}

static void test_bench(void) {
  np_scenario_config base;
  np_scenario_config_default(&base);
  uint64_t levels[] = {100, 300};
  np_bench_report* b = NULL;
  CHECK(np_bench(NP_BACKEND_GUARDS, &base, NULL, levels, 2, 1, &b) == NP_OK);
  CHECK(!np_bench_report_flagged(b));
  CHECK(np_bench_report_median(b, 0) >= 0.0);
  CHECK(!isnan(np_bench_report_ratio(b, 0)));
  CHECK(isnan(np_bench_report_ratio(b, 1)));
  CHECK(strstr(np_bench_report_json(b), "\"ratios\"") != NULL);
  np_bench_report_free(b);

  uint64_t bad[] = {300, 100};
  b = NULL;
  CHECK(np_bench(NP_BACKEND_GUARDS, &base, NULL, bad, 2, 1, &b) == NP_ERR_INVALID_ARGUMENT);
  CHECK(b == NULL);
}

int main(void) {
  test_names();
  test_run_and_validate();
  test_deadlock_and_errors();
  test_refinement();
  test_bench();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("capi: all checks passed\n");
  return 0;
}
