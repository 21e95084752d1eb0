#include "backends/sync.hpp"

#include <algorithm>

namespace northpole::backends {

void RunControl::on_cancel(std::function<void()> hook) {
  std::lock_guard lk(hooks_mu_);
  hooks_.push_back(std::move(hook));
}

void RunControl::cancel() {
  cancelled_ = true;
  std::lock_guard lk(hooks_mu_);
  for (auto& h : hooks_) h();
}

Semaphore::Semaphore(RunControl& ctl) : ctl_(ctl) {
  ctl_.on_cancel([this] {
    std::lock_guard lk(mu_);
    cv_.notify_all();
  });
}

void Semaphore::acquire() {
  std::unique_lock lk(mu_);
  if (ctl_.cancelled()) throw Cancelled{};
  if (count_ > 0) {
    --count_;
    return;
  }
  ++waiters_;
  ctl_.block();
  cv_.wait(lk, [&] { return handoffs_ > 0 || ctl_.cancelled(); });
  if (handoffs_ == 0) throw Cancelled{};
  --handoffs_;
}

void Semaphore::release() {
  std::lock_guard lk(mu_);
  ctl_.progress();
  if (waiters_ > 0) {
    --waiters_;
    ++handoffs_;
    ctl_.unblock();
    cv_.notify_one();
  } else {
    ++count_;
  }
}

struct Channel::Waiter {
  std::condition_variable cv;
  bool done = false;
  long value = 0;
  Channel* fired = nullptr;
};

ChannelHub::ChannelHub(RunControl& ctl) : ctl_(ctl) {
  ctl_.on_cancel([this] {
    std::lock_guard lk(mu_);
    for (auto* w : waiting_) w->cv.notify_all();
  });
}

void ChannelHub::wait(std::unique_lock<std::mutex>& lk, Channel::Waiter& w) {
  waiting_.push_back(&w);
  ctl_.block();
  w.cv.wait(lk, [&] { return w.done || ctl_.cancelled(); });
  waiting_.erase(std::find(waiting_.begin(), waiting_.end(), &w));
  if (!w.done) throw Cancelled{};
}

// Receivers may be select waiters already satisfied through another channel.
Channel::Waiter* Channel::pop_live_receiver() {
  while (!receivers_.empty()) {
    Waiter* r = receivers_.front();
    receivers_.pop_front();
    if (!r->done) return r;
  }
  return nullptr;
}

void Channel::send(long value) {
  std::unique_lock lk(hub_.mu_);
  if (hub_.ctl_.cancelled()) throw Cancelled{};
  if (Waiter* r = pop_live_receiver()) {
    r->value = value;
    r->fired = this;
    r->done = true;
    hub_.ctl_.unblock();
    hub_.ctl_.progress();
    r->cv.notify_one();
    return;
  }
  Waiter self;
  self.value = value;
  senders_.push_back(&self);
  try {
    hub_.wait(lk, self);
  } catch (const Cancelled&) {
    senders_.erase(std::find(senders_.begin(), senders_.end(), &self));
    throw;
  }
}

long Channel::recv() {
  std::unique_lock lk(hub_.mu_);
  if (hub_.ctl_.cancelled()) throw Cancelled{};
  if (auto v = try_recv_locked()) return *v;
  Waiter self;
  receivers_.push_back(&self);
  try {
    hub_.wait(lk, self);
  } catch (const Cancelled&) {
    auto it = std::find(receivers_.begin(), receivers_.end(), &self);
    if (it != receivers_.end()) receivers_.erase(it);
    throw;
  }
  return self.value;
}

std::optional<long> Channel::try_recv() {
  std::lock_guard lk(hub_.mu_);
  return try_recv_locked();
}

std::optional<long> Channel::try_recv_locked() {
  if (senders_.empty()) return std::nullopt;
  Waiter* s = senders_.front();
  senders_.pop_front();
  s->done = true;
  hub_.ctl_.unblock();
  hub_.ctl_.progress();
  s->cv.notify_one();
  return s->value;
}

ChannelHub::Selected ChannelHub::select(std::span<Channel* const> channels) {
  std::unique_lock lk(mu_);
  if (ctl_.cancelled()) throw Cancelled{};
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (auto v = channels[i]->try_recv_locked()) return {i, *v};
  }
  Channel::Waiter self;
  for (auto* ch : channels) ch->receivers_.push_back(&self);
  auto unregister = [&] {
    for (auto* ch : channels) {
      auto it = std::find(ch->receivers_.begin(), ch->receivers_.end(), &self);
      if (it != ch->receivers_.end()) ch->receivers_.erase(it);
    }
  };
  try {
    wait(lk, self);
  } catch (const Cancelled&) {
    unregister();
    throw;
  }
  unregister();
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i] == self.fired) return {i, self.value};
  }
  return {0, self.value};
}

Monitor::Monitor(RunControl& ctl) : ctl_(ctl) {
  ctl_.on_cancel([this] {
    std::lock_guard lk(mu_);
    cv_.notify_all();
  });
}

void Monitor::notify_all() {
  ++broadcasts_;
  ++generation_;
  ctl_.unblock(waiting_);
  waiting_ = 0;
  ctl_.progress();
  cv_.notify_all();
}

ActorThreads::ActorThreads(RunControl& ctl, std::chrono::milliseconds poll) : ctl_(ctl), poll_(poll) {}

ActorThreads::~ActorThreads() {
  if (!threads_.empty()) {
    ctl_.cancel();
    for (auto& t : threads_) t.join();
  }
}

void ActorThreads::spawn(std::function<void()> body) {
  pending_.push_back(std::move(body));
  pending_main_.push_back(false);
}

void ActorThreads::spawn_main(std::function<void()> body) {
  pending_.push_back(std::move(body));
  pending_main_.push_back(true);
}

void ActorThreads::launch(std::function<void()> body, bool main) {
  threads_.emplace_back([this, body = std::move(body), main] {
    try {
      body();
    } catch (const Cancelled&) {
    }
    ctl_.thread_exited();
    if (main) {
      std::lock_guard lk(mu_);
      main_done_ = true;
      cv_.notify_all();
    }
  });
}

bool ActorThreads::wait() {
  // Threads are counted live before any of them starts, so the deadlock
  // check never sees a partially started system.
  ctl_.set_live(static_cast<std::int64_t>(pending_.size()));
  for (std::size_t i = 0; i < pending_.size(); ++i) launch(std::move(pending_[i]), pending_main_[i]);
  pending_.clear();

  bool deadlocked = false;
  std::uint64_t last_progress = ~std::uint64_t{0};
  int stable_polls = 0;
  {
    std::unique_lock lk(mu_);
    while (!cv_.wait_for(lk, poll_, [&] { return main_done_; })) {
      const auto progress = ctl_.progress_count();
      const bool all_blocked = ctl_.live() > 0 && ctl_.blocked() >= ctl_.live();
      if (all_blocked && progress == last_progress) {
        if (++stable_polls >= 2) {
          deadlocked = true;
          break;
        }
      } else {
        stable_polls = 0;
      }
      last_progress = progress;
    }
  }
  ctl_.cancel();
  for (auto& t : threads_) t.join();
  threads_.clear();
  return deadlocked;
}

}  // namespace northpole::backends
