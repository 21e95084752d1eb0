#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

namespace northpole::backends {

// Thrown out of a blocking operation once the run is cancelled.
struct Cancelled {};

// Shared bookkeeping for one thread-based run: how many actor threads are
// alive, how many are blocked with no wakeup pending, and a progress counter
// bumped by every completed synchronization.
class RunControl {
 public:
  void set_live(std::int64_t n) { live_ = n; }
  void thread_exited() { --live_; }
  void block() { ++blocked_; }
  void unblock(std::int64_t n = 1) { blocked_ -= n; }
  void progress() { progress_.fetch_add(1, std::memory_order_relaxed); }

  std::int64_t live() const { return live_.load(); }
  std::int64_t blocked() const { return blocked_.load(); }
  std::uint64_t progress_count() const { return progress_.load(); }

  bool cancelled() const { return cancelled_.load(); }
  void on_cancel(std::function<void()> hook);
  void cancel();

 private:
  std::atomic<std::int64_t> live_{0};
  std::atomic<std::int64_t> blocked_{0};
  std::atomic<std::uint64_t> progress_{0};
  std::atomic<bool> cancelled_{false};
  std::mutex hooks_mu_;
  std::vector<std::function<void()>> hooks_;
};

// Counting semaphore, initially 0. A release with a waiter present hands the
// unit directly to that waiter.
class Semaphore {
 public:
  explicit Semaphore(RunControl& ctl);

  void acquire();  // P
  void release();  // V

 private:
  RunControl& ctl_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::uint64_t count_ = 0;
  std::uint64_t waiters_ = 0;
  std::uint64_t handoffs_ = 0;
};

class ChannelHub;

// Unbuffered rendezvous channel carrying integers: a send completes only
// together with a matching receive.
class Channel {
 public:
  explicit Channel(ChannelHub& hub) : hub_(hub) {}

  void send(long value);
  long recv();
  // Receives only if a sender is already waiting.
  std::optional<long> try_recv();

 private:
  friend class ChannelHub;
  struct Waiter;
  Waiter* pop_live_receiver();
  std::optional<long> try_recv_locked();

  ChannelHub& hub_;
  std::deque<Waiter*> senders_;
  std::deque<Waiter*> receivers_;
};

// Owns the lock shared by a family of channels, which is what makes a
// multi-channel select atomic.
class ChannelHub {
 public:
  explicit ChannelHub(RunControl& ctl);

  struct Selected {
    std::size_t index;
    long value;
  };
  // Blocks until one of `channels` has a sender; the first ready channel in
  // argument order wins.
  Selected select(std::span<Channel* const> channels);

 private:
  friend class Channel;
  void wait(std::unique_lock<std::mutex>& lk, Channel::Waiter& w);

  RunControl& ctl_;
  std::mutex mu_;
  std::vector<Channel::Waiter*> waiting_;
};

// One lock and one condition for everything, with wake-all on every state
// change. Counts how many wakeups found their condition still false.
class Monitor {
 public:
  explicit Monitor(RunControl& ctl);

  std::unique_lock<std::mutex> enter() { return std::unique_lock(mu_); }

  template <class Pred>
  void await(std::unique_lock<std::mutex>& lk, Pred ready) {
    while (!ready()) {
      if (ctl_.cancelled()) throw Cancelled{};
      ++waiting_;
      ctl_.block();
      const std::uint64_t gen = generation_;
      cv_.wait(lk, [&] { return generation_ != gen || ctl_.cancelled(); });
      if (generation_ == gen) throw Cancelled{};
      ++wakeups_;
      if (!ready()) ++wasted_;
    }
  }
  // Caller holds the lock.
  void notify_all();

  std::uint64_t broadcasts() const { return broadcasts_; }
  std::uint64_t wakeups() const { return wakeups_; }
  std::uint64_t wasted_wakeups() const { return wasted_; }

 private:
  RunControl& ctl_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::uint64_t generation_ = 0;
  std::int64_t waiting_ = 0;
  std::uint64_t broadcasts_ = 0;
  std::uint64_t wakeups_ = 0;
  std::uint64_t wasted_ = 0;
};

// Starts actor threads and waits until the coordinating thread finishes or
// every live thread is blocked with no progress between two polls.
class ActorThreads {
 public:
  ActorThreads(RunControl& ctl, std::chrono::milliseconds poll);
  ~ActorThreads();

  void spawn(std::function<void()> body);
  // The coordinator: its return ends the run.
  void spawn_main(std::function<void()> body);
  // Returns true when the run ended in deadlock. Cancels and joins.
  bool wait();

 private:
  void launch(std::function<void()> body, bool main);

  RunControl& ctl_;
  std::chrono::milliseconds poll_;
  std::vector<std::function<void()>> pending_;
  std::vector<bool> pending_main_;
  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_;
  bool main_done_ = false;
};

}  // namespace northpole::backends
