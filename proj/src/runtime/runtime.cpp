#include "runtime/runtime.hpp"

#include <algorithm>

namespace northpole::runtime {

const char* to_string(RunOutcome outcome) {
  switch (outcome) {
    case RunOutcome::Stopped:
      return "Stopped";
    case RunOutcome::Quiescent:
      return "Quiescent";
    case RunOutcome::Deadlocked:
      return "Deadlocked";
  }
  return "?";
}

StopCondition StopCondition::quiescence() { return StopCondition{}; }

StopCondition StopCondition::when(ObjectHandle object, Predicate predicate) {
  StopCondition s;
  s.kind_ = Kind::FieldPredicate;
  s.object_ = object.id;
  s.predicate_ = std::move(predicate);
  return s;
}

StopCondition StopCondition::after_action_firings(std::uint64_t count) {
  StopCondition s;
  s.kind_ = Kind::ActionFirings;
  s.firings_ = count;
  return s;
}

struct Runtime::Frame {
  Object* obj = nullptr;
  const std::vector<Segment>* body = nullptr;
  const std::vector<std::size_t>* targets = nullptr;
  std::size_t member = 0;
  std::size_t next = 0;
  bool is_action = false;
  bool entered = false;
  std::vector<Value> args;
};

struct Runtime::Task {
  ObjectId origin = kExternalOrigin;
  std::vector<Frame> frames;
  bool external = false;
  std::promise<void> done;
  // Bookkeeping while parked in a waiter list.
  std::uint64_t suspended_at = 0;
  std::uint64_t rechecks = 0;
};

struct Runtime::Object {
  ObjectId id = 0;
  std::shared_ptr<const ClassDescriptor> cls;
  std::vector<Value> fields;
  std::vector<Object*> refs;
  // Resolved callee method index per segment; npos when the segment has no call.
  std::vector<std::vector<std::size_t>> method_targets;
  std::vector<std::vector<std::size_t>> action_targets;

  mutable std::mutex mu;
  std::deque<TaskPtr> waiters;
  bool action_active = false;
  bool destroyed = false;
  std::size_t next_action = 0;
  std::atomic<int> inside{0};
  std::atomic<int> suspended_actions{0};
  std::atomic<std::uint64_t> max_suspended_actions{0};
  ObjectStats stats;
};

namespace {

constexpr std::size_t kNoCall = static_cast<std::size_t>(-1);

std::vector<std::vector<std::size_t>> resolve_targets(const ClassDescriptor& cls,
                                                      const std::vector<ObjectHandle>& refs,
                                                      const std::vector<const std::vector<Segment>*>& bodies,
                                                      const std::vector<std::string>& owners) {
  std::vector<std::vector<std::size_t>> out;
  out.reserve(bodies.size());
  for (std::size_t b = 0; b < bodies.size(); ++b) {
    std::vector<std::size_t> row;
    for (const auto& seg : *bodies[b]) {
      if (!seg.call) {
        row.push_back(kNoCall);
        continue;
      }
      const ClassDescriptor* target = refs[seg.call->target_param].cls;
      auto idx = target->method_index(seg.call->method);
      if (!idx) {
        throw CallError(cls.name + "." + owners[b] + " calls unknown method " + target->name + "." +
                        seg.call->method);
      }
      row.push_back(*idx);
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

Runtime::Runtime(SchedulerConfig config, trace::EventSink* sink) : config_(config), sink_(sink) {
  if (config_.worker_count == 0) throw std::invalid_argument("worker_count must be at least 1");
}

Runtime::~Runtime() {
  halt();
  // Remaining tasks are dropped; external callers observe a broken promise.
  std::lock_guard lk(queue_mu_);
  ready_.clear();
}

Runtime::Object& Runtime::lookup(ObjectHandle handle) const {
  std::lock_guard lk(objects_mu_);
  if (handle.id >= objects_.size() || objects_[handle.id]->cls.get() != handle.cls) {
    throw CallError("unknown object handle #" + std::to_string(handle.id));
  }
  return *objects_[handle.id];
}

ObjectHandle Runtime::create_object(std::shared_ptr<const ClassDescriptor> cls, std::vector<ObjectHandle> ctor_args) {
  if (!cls) throw std::invalid_argument("create_object: null class descriptor");
  cls->validate();
  if (ctor_args.size() != cls->params.size()) {
    throw DescriptorError(cls->name + " expects " + std::to_string(cls->params.size()) +
                          " constructor argument(s), got " + std::to_string(ctor_args.size()));
  }
  auto obj = std::make_unique<Object>();
  obj->cls = cls;
  obj->fields = cls->initial_values();
  for (const auto& ref : ctor_args) obj->refs.push_back(&lookup(ref));

  std::vector<const std::vector<Segment>*> bodies;
  std::vector<std::string> owners;
  for (const auto& m : cls->methods) {
    bodies.push_back(&m.body);
    owners.push_back(m.name);
  }
  obj->method_targets = resolve_targets(*cls, ctor_args, bodies, owners);
  bodies.clear();
  owners.clear();
  for (std::size_t i = 0; i < cls->actions.size(); ++i) {
    bodies.push_back(&cls->actions[i].body);
    owners.push_back(cls->actions[i].name.empty() ? "action" + std::to_string(i) : cls->actions[i].name);
  }
  obj->action_targets = resolve_targets(*cls, ctor_args, bodies, owners);

  Object* raw = obj.get();
  {
    std::lock_guard lk(objects_mu_);
    raw->id = objects_.size();
    objects_.push_back(std::move(obj));
  }
  {
    std::lock_guard lk(raw->mu);
    maybe_schedule_action(*raw);
  }
  return ObjectHandle{raw->id, cls.get()};
}

void Runtime::destroy_object(ObjectHandle handle) {
  Object& o = lookup(handle);
  std::deque<TaskPtr> orphans;
  {
    std::lock_guard lk(o.mu);
    o.destroyed = true;
    orphans.swap(o.waiters);
    o.stats.suspended_callers = 0;
  }
  for (auto& t : orphans) {
    --suspended_;
    on_resume(*t);
    fail_task(std::move(t), std::make_exception_ptr(CallError("object #" + std::to_string(o.id) + " destroyed")));
  }
}

std::future<void> Runtime::call_async(ObjectHandle target, std::string_view method, std::vector<Value> args) {
  Object& o = lookup(target);
  auto idx = o.cls->method_index(method);
  if (!idx) throw CallError(o.cls->name + " has no method '" + std::string(method) + "'");
  if (args.size() != o.cls->methods[*idx].arity) {
    throw CallError(o.cls->name + "." + std::string(method) + " takes " +
                    std::to_string(o.cls->methods[*idx].arity) + " argument(s)");
  }
  {
    std::lock_guard lk(o.mu);
    if (o.destroyed) throw CallError("call on destroyed object #" + std::to_string(o.id));
  }
  auto task = std::make_unique<Task>();
  task->external = true;
  Frame f;
  f.obj = &o;
  f.member = *idx;
  f.body = &o.cls->methods[*idx].body;
  f.targets = &o.method_targets[*idx];
  f.args = std::move(args);
  task->frames.push_back(std::move(f));
  auto fut = task->done.get_future();
  enqueue(std::move(task));
  return fut;
}

void Runtime::call(ObjectHandle target, std::string_view method, std::vector<Value> args) {
  call_async(target, method, std::move(args)).get();
}

void Runtime::start() {
  if (!workers_.empty()) return;
  halting_ = false;
  for (std::size_t i = 0; i < config_.worker_count; ++i) workers_.emplace_back([this] { worker_loop(); });
}

void Runtime::halt() {
  {
    std::lock_guard lk(queue_mu_);
    halting_ = true;
  }
  queue_cv_.notify_all();
  for (auto& w : workers_) w.join();
  workers_.clear();
}

RunOutcome Runtime::run(const StopCondition& stop) {
  halt();
  {
    std::lock_guard lk(state_mu_);
    stop_ = stop;
    if (stop.kind() == StopCondition::Kind::ActionFirings) stop_ = StopCondition::after_action_firings(firings_ + stop.firings());
    stop_requested_ = false;
    error_ = nullptr;
  }
  start();
  RunOutcome outcome = RunOutcome::Quiescent;
  {
    std::unique_lock lk(state_mu_);
    for (;;) {
      if (error_ || stop_requested_) {
        outcome = RunOutcome::Stopped;
        break;
      }
      if (active_.load() == 0) {
        outcome = suspended_.load() > 0 ? RunOutcome::Deadlocked : RunOutcome::Quiescent;
        break;
      }
      state_cv_.wait_for(lk, config_.deadlock_poll_interval);
    }
  }
  halt();
  std::exception_ptr error;
  {
    std::lock_guard lk(state_mu_);
    error = error_;
    stop_ = StopCondition::quiescence();
  }
  if (error) std::rethrow_exception(error);
  return outcome;
}

bool Runtime::detect_deadlock() const { return active_.load() == 0 && suspended_.load() > 0; }

std::vector<Value> Runtime::fields(ObjectHandle handle) const {
  Object& o = lookup(handle);
  std::lock_guard lk(o.mu);
  return o.fields;
}

ObjectStats Runtime::stats(ObjectHandle handle) const {
  Object& o = lookup(handle);
  std::lock_guard lk(o.mu);
  ObjectStats s = o.stats;
  s.suspended_callers = o.waiters.size();
  s.max_suspended_actions = o.max_suspended_actions.load();
  return s;
}

void Runtime::enqueue(TaskPtr task, bool front) {
  ++active_;
  {
    std::lock_guard lk(queue_mu_);
    if (front) {
      ready_.push_front(std::move(task));
    } else {
      ready_.push_back(std::move(task));
    }
  }
  queue_cv_.notify_one();
}

void Runtime::task_retired() {
  if (--active_ == 0) state_cv_.notify_all();
}

void Runtime::worker_loop() {
  for (;;) {
    TaskPtr task;
    {
      std::unique_lock lk(queue_mu_);
      queue_cv_.wait(lk, [&] { return halting_.load() || !ready_.empty(); });
      if (halting_) return;
      task = std::move(ready_.front());
      ready_.pop_front();
    }
    execute(std::move(task));
    task_retired();
  }
}

void Runtime::record_error(std::exception_ptr error) {
  {
    std::lock_guard lk(state_mu_);
    if (!error_) error_ = error;
  }
  {
    std::lock_guard lk(queue_mu_);
    halting_ = true;
  }
  queue_cv_.notify_all();
  state_cv_.notify_all();
}

void Runtime::request_stop() {
  {
    std::lock_guard lk(state_mu_);
    stop_requested_ = true;
  }
  {
    std::lock_guard lk(queue_mu_);
    halting_ = true;
  }
  queue_cv_.notify_all();
  state_cv_.notify_all();
}

void Runtime::fail_task(TaskPtr task, std::exception_ptr error) {
  if (task->external) {
    task->done.set_exception(error);
  } else {
    record_error(error);
  }
}

void Runtime::complete(TaskPtr task) {
  if (task->external) task->done.set_value();
}

void Runtime::suspend(Object& o, TaskPtr task) {
  task->suspended_at = o.stats.segments_completed;
  task->rechecks = 0;
  if (task->origin != kExternalOrigin && task->frames.front().is_action) {
    Object& origin = *task->frames.front().obj;
    const std::uint64_t n = static_cast<std::uint64_t>(++origin.suspended_actions);
    std::uint64_t seen = origin.max_suspended_actions.load();
    while (n > seen && !origin.max_suspended_actions.compare_exchange_weak(seen, n)) {
    }
  }
  ++suspended_;
  o.waiters.push_back(std::move(task));
}

void Runtime::on_resume(Task& task) {
  if (task.origin != kExternalOrigin && task.frames.front().is_action) {
    --task.frames.front().obj->suspended_actions;
  }
}

std::optional<std::size_t> Runtime::pick_enabled_action(Object& o) {
  const auto& actions = o.cls->actions;
  const std::size_t n = actions.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t i = (o.next_action + k) % n;
    const auto& g = actions[i].guard;
    if (!g || g(o.fields)) {
      o.next_action = (i + 1) % n;
      return i;
    }
  }
  return std::nullopt;
}

void Runtime::maybe_schedule_action(Object& o) {
  if (o.action_active || o.destroyed || o.cls->actions.empty()) return;
  bool enabled = false;
  for (const auto& a : o.cls->actions) {
    if (!a.guard || a.guard(o.fields)) {
      enabled = true;
      break;
    }
  }
  if (!enabled) return;
  o.action_active = true;
  auto task = std::make_unique<Task>();
  task->origin = o.id;
  Frame f;
  f.obj = &o;
  f.is_action = true;
  task->frames.push_back(std::move(f));
  enqueue(std::move(task));
}

// Called with o.mu held. Returns false when the task was suspended or dropped.
bool Runtime::enter_frame(Object& o, Task& task, Frame& f) {
  if (f.is_action) {
    auto idx = pick_enabled_action(o);
    if (!idx) {
      o.action_active = false;
      return false;
    }
    if (stop_.kind() == StopCondition::Kind::ActionFirings) {
      auto n = firings_.fetch_add(1);
      if (n >= stop_.firings()) {
        --firings_;
        o.action_active = false;
        request_stop();
        return false;
      }
    } else {
      ++firings_;
    }
    if (o.suspended_actions.load() > 0) ++o.stats.reentrant_action_starts;
    ++o.stats.actions_started;
    f.member = *idx;
    f.body = &o.cls->actions[*idx].body;
    f.targets = &o.action_targets[*idx];
    f.entered = true;
    return true;
  }
  (void)task;
  ++o.stats.initial_guard_checks;
  const auto& guard = o.cls->methods[f.member].guard;
  if (guard && !guard(o.fields)) return false;
  f.entered = true;
  return true;
}

// Runs the frame's next segment. A call that the update declines to make
// does not release the exclusion, so the following segment runs straight on.
std::optional<Runtime::PendingCall> Runtime::run_segment(Object& o, Task& task, Frame& f) {
  while (f.next < f.body->size()) {
    const std::size_t index = f.next++;
    const Segment& seg = (*f.body)[index];
    if (o.inside.fetch_add(1) != 0) ++o.stats.exclusion_violations;
    bool make_call = true;
    SegmentContext ctx(o.fields, f.args, o.id, task.origin, sink_);
    if (seg.update) {
      try {
        make_call = seg.update(ctx);
      } catch (...) {
        --o.inside;
        throw;
      }
    }
    --o.inside;
    if (!seg.call) return std::nullopt;
    if (!make_call) continue;
    std::vector<Value> args;
    if (seg.call->args) args = seg.call->args(ctx);
    Object* target = o.refs[seg.call->target_param];
    const auto& callee = target->cls->methods[(*f.targets)[index]];
    if (args.size() != callee.arity) {
      throw CallError("arity mismatch calling " + target->cls->name + "." + callee.name);
    }
    return PendingCall{o.refs[seg.call->target_param], (*f.targets)[index], std::move(args)};
  }
  return std::nullopt;
}

void Runtime::after_segment(Object& o) {
  ++o.stats.segments_completed;
  const auto& fields = o.cls->fields;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (!fields[i].domain.contains(o.fields[i])) {
      throw DomainViolation(o.cls->name + "#" + std::to_string(o.id) + "." + fields[i].name + " = " +
                            std::to_string(o.fields[i]) + " outside " + fields[i].domain.describe());
    }
  }
  if (stop_.kind() == StopCondition::Kind::FieldPredicate && stop_.object() == o.id) {
    if (stop_.predicate()(o.fields)) request_stop();
  } else if (stop_.kind() == StopCondition::Kind::ActionFirings && firings_.load() >= stop_.firings()) {
    request_stop();
  }
}

// Hands the object to suspended callers whose guard became true. Each scan
// follows a segment completion; a woken caller runs its first segment here,
// under the exclusion already held, and the next scan sees its effects.
void Runtime::settle(Object& o) {
  bool changed = true;
  while (changed && !o.waiters.empty() && !halting_.load()) {
    changed = false;
    ++o.stats.recheck_scans;
    std::size_t k = 0;
    while (k < o.waiters.size()) {
      const std::size_t n = o.waiters.size();
      const std::size_t pos = config_.wakeup_policy == WakeupPolicy::Fifo ? k : n - 1 - k;
      Task& w = *o.waiters[pos];
      ++o.stats.guard_rechecks;
      if (++w.rechecks > o.stats.segments_completed - w.suspended_at) ++o.stats.guard_stability_violations;
      const auto& guard = o.cls->methods[w.frames.back().member].guard;
      if (guard && !guard(o.fields)) {
        ++k;
        continue;
      }
      TaskPtr woken = std::move(o.waiters[pos]);
      o.waiters.erase(o.waiters.begin() + static_cast<std::ptrdiff_t>(pos));
      --suspended_;
      on_resume(*woken);
      const bool runs_segment = !woken->frames.back().body->empty();
      resume_inline(o, std::move(woken));
      if (runs_segment) {
        changed = true;
        break;
      }
      // An empty body changes nothing; the remaining waiters see the same state.
    }
  }
}

void Runtime::resume_inline(Object& o, TaskPtr task) {
  Frame& f = task->frames.back();
  f.entered = true;
  std::optional<PendingCall> call;
  if (f.next < f.body->size()) {
    call = run_segment(o, *task, f);
    after_segment(o);
  }
  continue_after_segment(std::move(task), std::move(call));
}

// Moves a task on after a segment ran outside its own worker loop.
void Runtime::continue_after_segment(TaskPtr task, std::optional<PendingCall> call) {
  Frame& f = task->frames.back();
  if (call) {
    Frame callee;
    callee.obj = call->target;
    callee.member = call->method;
    callee.body = &call->target->cls->methods[call->method].body;
    callee.targets = &call->target->method_targets[call->method];
    callee.args = std::move(call->args);
    task->frames.push_back(std::move(callee));
    enqueue(std::move(task));
    return;
  }
  if (f.next >= f.body->size() && !f.is_action) {
    task->frames.pop_back();
    if (task->frames.empty()) {
      complete(std::move(task));
      return;
    }
  }
  enqueue(std::move(task));
}

void Runtime::execute(TaskPtr task) {
  try {
    for (;;) {
      Frame& f = task->frames.back();
      // A method frame with nothing left after its last call just returns.
      if (!f.is_action && f.entered && f.next >= f.body->size()) {
        task->frames.pop_back();
        if (task->frames.empty()) {
          complete(std::move(task));
          return;
        }
        continue;
      }
      Object& o = *f.obj;
      std::optional<PendingCall> call;
      bool finished = false;
      {
        std::unique_lock lk(o.mu);
        if (halting_.load()) {
          lk.unlock();
          enqueue(std::move(task), /*front=*/true);
          return;
        }
        if (o.destroyed) {
          lk.unlock();
          fail_task(std::move(task),
                    std::make_exception_ptr(CallError("call on destroyed object #" + std::to_string(o.id))));
          return;
        }
        if (!f.entered) {
          if (f.is_action) {
            if (!enter_frame(o, *task, f)) {
              if (!o.action_active) maybe_schedule_action(o);
              return;
            }
          } else if (!enter_frame(o, *task, f)) {
            suspend(o, std::move(task));
            return;
          }
        }
        if (f.next < f.body->size()) {
          call = run_segment(o, *task, f);
          after_segment(o);
          settle(o);
        }
        finished = !call && f.next >= f.body->size();
        if (finished && f.is_action) o.action_active = false;
        maybe_schedule_action(o);
      }
      if (call) {
        Frame callee;
        callee.obj = call->target;
        callee.member = call->method;
        callee.body = &call->target->cls->methods[call->method].body;
        callee.targets = &call->target->method_targets[call->method];
        callee.args = std::move(call->args);
        task->frames.push_back(std::move(callee));
        continue;
      }
      if (finished) {
        task->frames.pop_back();
        if (task->frames.empty()) {
          complete(std::move(task));
          return;
        }
      }
    }
  } catch (...) {
    auto error = std::current_exception();
    if (task) {
      fail_task(std::move(task), error);
    } else {
      record_error(error);
    }
  }
}

}  // namespace northpole::runtime
