#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <span>
#include <string_view>
#include <thread>
#include <vector>

#include "runtime/class_descriptor.hpp"

namespace northpole::runtime {

enum class WakeupPolicy { Fifo, Lifo };

struct SchedulerConfig {
  std::size_t worker_count = 1;
  WakeupPolicy wakeup_policy = WakeupPolicy::Fifo;
  std::chrono::milliseconds deadlock_poll_interval{5};
};

struct ObjectHandle {
  ObjectId id = 0;
  const ClassDescriptor* cls = nullptr;

  bool operator==(const ObjectHandle&) const = default;
};

enum class RunOutcome { Stopped, Quiescent, Deadlocked };

const char* to_string(RunOutcome outcome);

class StopCondition {
 public:
  enum class Kind { Quiescence, FieldPredicate, ActionFirings };
  using Predicate = std::function<bool(std::span<const Value> fields)>;

  // Run until nothing is runnable.
  static StopCondition quiescence();
  // Evaluated after every segment completion on `object`, under that
  // object's exclusion; may keep state between invocations.
  static StopCondition when(ObjectHandle object, Predicate predicate);
  // Stop once `count` actions have been initiated system-wide.
  static StopCondition after_action_firings(std::uint64_t count);

  Kind kind() const { return kind_; }
  ObjectId object() const { return object_; }
  const Predicate& predicate() const { return predicate_; }
  std::uint64_t firings() const { return firings_; }

 private:
  Kind kind_ = Kind::Quiescence;
  ObjectId object_ = 0;
  Predicate predicate_;
  std::uint64_t firings_ = 0;
};

// Instrumentation counters kept per object.
struct ObjectStats {
  std::uint64_t segments_completed = 0;
  std::uint64_t initial_guard_checks = 0;
  std::uint64_t guard_rechecks = 0;
  std::uint64_t recheck_scans = 0;
  std::uint64_t guard_stability_violations = 0;
  std::uint64_t exclusion_violations = 0;
  std::uint64_t actions_started = 0;
  std::uint64_t reentrant_action_starts = 0;
  std::uint64_t max_suspended_actions = 0;
  std::uint64_t suspended_callers = 0;
};

class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CallError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class DomainViolation : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

// Executes concurrent objects: guarded methods invoked by callers and
// guarded actions that fire on their own, multiplexed as lightweight tasks
// over a small worker pool. At most one segment of an object runs at a time;
// a caller's exclusion on its own object is released across outgoing calls.
class Runtime {
 public:
  explicit Runtime(SchedulerConfig config = {}, trace::EventSink* sink = nullptr);
  ~Runtime();

  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  ObjectHandle create_object(std::shared_ptr<const ClassDescriptor> cls, std::vector<ObjectHandle> ctor_args = {});
  void destroy_object(ObjectHandle object);

  // Blocks until the method's guard held and its whole body ran. Workers must
  // be running (start() or a concurrent run()) for the call to make progress.
  void call(ObjectHandle target, std::string_view method, std::vector<Value> args = {});
  std::future<void> call_async(ObjectHandle target, std::string_view method, std::vector<Value> args = {});

  void start();
  void halt();
  // Starts the workers, waits for the stop condition, quiescence or
  // deadlock, then halts. Rethrows the first error raised by a segment.
  RunOutcome run(const StopCondition& stop);

  bool detect_deadlock() const;

  std::vector<Value> fields(ObjectHandle object) const;
  ObjectStats stats(ObjectHandle object) const;
  std::uint64_t action_firings() const { return firings_.load(); }
  std::uint64_t suspended_count() const { return static_cast<std::uint64_t>(suspended_.load()); }
  const SchedulerConfig& config() const { return config_; }

 private:
  struct Object;
  struct Frame;
  struct Task;
  using TaskPtr = std::unique_ptr<Task>;
  struct PendingCall {
    Object* target;
    std::size_t method;
    std::vector<Value> args;
  };

  Object& lookup(ObjectHandle handle) const;
  void worker_loop();
  void enqueue(TaskPtr task, bool front = false);
  void execute(TaskPtr task);
  bool enter_frame(Object& o, Task& task, Frame& frame);
  std::optional<PendingCall> run_segment(Object& o, Task& task, Frame& frame);
  void after_segment(Object& o);
  void settle(Object& o);
  void resume_inline(Object& o, TaskPtr task);
  void continue_after_segment(TaskPtr task, std::optional<PendingCall> call);
  void maybe_schedule_action(Object& o);
  std::optional<std::size_t> pick_enabled_action(Object& o);
  void suspend(Object& o, TaskPtr task);
  void on_resume(Task& task);
  void complete(TaskPtr task);
  void fail_task(TaskPtr task, std::exception_ptr error);
  void record_error(std::exception_ptr error);
  void request_stop();
  void task_retired();

  SchedulerConfig config_;
  trace::EventSink* sink_;

  mutable std::mutex objects_mu_;
  std::vector<std::unique_ptr<Object>> objects_;

  std::mutex queue_mu_;
  std::condition_variable queue_cv_;
  std::deque<TaskPtr> ready_;
  std::vector<std::thread> workers_;

  std::atomic<bool> halting_{true};
  std::atomic<std::int64_t> active_{0};
  std::atomic<std::int64_t> suspended_{0};
  std::atomic<std::uint64_t> firings_{0};

  std::mutex state_mu_;
  std::condition_variable state_cv_;
  bool stop_requested_ = false;
  std::exception_ptr error_;
  StopCondition stop_ = StopCondition::quiescence();
};

}  // namespace northpole::runtime
