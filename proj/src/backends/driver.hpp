#pragma once

#include <chrono>

#include "backends/run_stats.hpp"
#include "runtime/runtime.hpp"
#include "santa/santa_model.hpp"
#include "trace/trace_event.hpp"

namespace northpole::backends {

struct DriverOptions {
  // Worker pool size for the guards backend; thread backends use one OS
  // thread per actor regardless.
  std::size_t worker_count = 1;
  runtime::WakeupPolicy wakeup_policy = runtime::WakeupPolicy::Fifo;
  std::chrono::milliseconds deadlock_poll_interval{5};
};

// Each driver runs the scenario to Santa's `santa_rounds`-th return to sleep,
// or until it deadlocks, and reports counts. `sink` may be null.
RunStats run_guards(const santa::ScenarioConfig& cfg, trace::EventSink* sink, const DriverOptions& opts = {});
RunStats run_semaphores(const santa::ScenarioConfig& cfg, trace::EventSink* sink, const DriverOptions& opts = {});
RunStats run_channels(const santa::ScenarioConfig& cfg, trace::EventSink* sink, const DriverOptions& opts = {});
RunStats run_monitor(const santa::ScenarioConfig& cfg, trace::EventSink* sink, const DriverOptions& opts = {});

RunStats run_backend(Backend backend, const santa::ScenarioConfig& cfg, trace::EventSink* sink,
                     const DriverOptions& opts = {});

}  // namespace northpole::backends
