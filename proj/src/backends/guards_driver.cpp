#include <chrono>

#include "backends/driver.hpp"

namespace northpole::backends {

RunStats run_guards(const santa::ScenarioConfig& cfg, trace::EventSink* sink, const DriverOptions& opts) {
  cfg.validate();
  Recorder recorder(cfg.reindeer_count, cfg.elf_count, sink);
  runtime::SchedulerConfig sched;
  sched.worker_count = opts.worker_count;
  sched.wakeup_policy = opts.wakeup_policy;
  sched.deadlock_poll_interval = opts.deadlock_poll_interval;
  runtime::Runtime rt(sched, &recorder);
  auto scenario = santa::build_scenario(rt, cfg);

  const auto t0 = std::chrono::steady_clock::now();
  const auto outcome = rt.run(santa::santa_sleeps(scenario, cfg.santa_rounds));
  const auto t1 = std::chrono::steady_clock::now();

  RunStats stats;
  stats.backend = Backend::Guards;
  stats.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
  switch (outcome) {
    case runtime::RunOutcome::Stopped:
      stats.outcome = Outcome::Completed;
      break;
    case runtime::RunOutcome::Quiescent:
      stats.outcome = Outcome::Quiescent;
      break;
    case runtime::RunOutcome::Deadlocked:
      stats.outcome = Outcome::Deadlocked;
      break;
  }
  recorder.fill(stats);
  for (auto h : {scenario.santa, scenario.sleigh, scenario.shop}) {
    const auto s = rt.stats(h);
    stats.guard_rechecks += s.guard_rechecks;
    stats.state_changes += s.segments_completed;
  }
  stats.sync_operations = stats.state_changes;
  return stats;
}

}  // namespace northpole::backends
