#include <chrono>

#include "backends/driver.hpp"
#include "backends/emit.hpp"
#include "backends/sync.hpp"

namespace northpole::backends {

using detail::emit;
using trace::EventKind;
using trace::SessionKind;

namespace {

enum class R { Relaxing, Back, Harnessing, Harnessed, Pulling, Done };
enum class E { Working, Puzzled, Entering, Entered, Consulting, Enlightened };

// Sleigh, shop and Santa state behind a single monitor. Every method ends
// with a broadcast, so most woken threads go straight back to waiting.
class SantasShop {
 public:
  SantasShop(RunControl& ctl, trace::EventSink& sink, std::size_t barrier, std::size_t group)
      : m_(ctl), sink_(sink), barrier_(barrier), group_(group), rc_(barrier), ec_(group) {}

  void back(long id) { reindeer_step(R::Relaxing, R::Back, EventKind::Back, id); }
  void harness(long id) { reindeer_step(R::Harnessing, R::Harnessed, EventKind::Harness, id); }
  void pull(long id) { reindeer_step(R::Pulling, R::Done, EventKind::Pull, id); }

  void puzzled(long id) {
    auto lk = m_.enter();
    m_.await(lk, [&] { return es_ == E::Working; });
    emit(sink_, detail::elf(id), EventKind::Puzzled);
    if (--ec_ == 0) {
      es_ = E::Puzzled;
      ec_ = group_;
    }
    m_.notify_all();
  }
  void enter(long id) {
    auto lk = m_.enter();
    m_.await(lk, [&] { return es_ == E::Entering; });
    emit(sink_, detail::elf(id), EventKind::Enter);
    es_ = E::Entered;
    m_.notify_all();
  }
  void consult(long id) {
    auto lk = m_.enter();
    m_.await(lk, [&] { return es_ == E::Consulting; });
    emit(sink_, detail::elf(id), EventKind::Consult);
    es_ = E::Enlightened;
    m_.notify_all();
  }

  SessionKind wakeup() {
    auto lk = m_.enter();
    m_.await(lk, [&] { return rs_ == R::Back || es_ == E::Puzzled; });
    const bool reindeer_back = rs_ == R::Back;
    const bool elves_ready = es_ == E::Puzzled;
    if (reindeer_back) {
      detail::decide(sink_, reindeer_back, elves_ready, SessionKind::Deliver);
      rs_ = R::Harnessing;
      m_.notify_all();
      return SessionKind::Deliver;
    }
    detail::decide(sink_, reindeer_back, elves_ready, SessionKind::Help);
    es_ = E::Entering;
    m_.notify_all();
    return SessionKind::Help;
  }
  void hitch() {
    auto lk = m_.enter();
    m_.await(lk, [&] { return rs_ == R::Harnessed; });
    rs_ = R::Pulling;
    m_.notify_all();
  }
  void ride() {
    auto lk = m_.enter();
    m_.await(lk, [&] { return rs_ == R::Done; });
    rs_ = R::Relaxing;
    detail::end_session(sink_, SessionKind::Deliver);
    m_.notify_all();
  }
  void welcome() {
    auto lk = m_.enter();
    m_.await(lk, [&] { return es_ == E::Entered; });
    es_ = E::Consulting;
    m_.notify_all();
  }
  void explain() {
    auto lk = m_.enter();
    m_.await(lk, [&] { return es_ == E::Enlightened; });
    if (--ec_ == 0) {
      es_ = E::Working;
      ec_ = group_;
      detail::end_session(sink_, SessionKind::Help);
    } else {
      es_ = E::Entering;
    }
    m_.notify_all();
  }

  const Monitor& monitor() const { return m_; }

 private:
  void reindeer_step(R expected, R next, EventKind kind, long id) {
    auto lk = m_.enter();
    m_.await(lk, [&] { return rs_ == expected; });
    emit(sink_, detail::reindeer(id), kind);
    if (--rc_ == 0) {
      rs_ = next;
      rc_ = barrier_;
    }
    m_.notify_all();
  }

  Monitor m_;
  trace::EventSink& sink_;
  const std::size_t barrier_;
  const std::size_t group_;
  std::size_t rc_;
  std::size_t ec_;
  R rs_ = R::Relaxing;
  E es_ = E::Working;
};

}  // namespace

RunStats run_monitor(const santa::ScenarioConfig& cfg, trace::EventSink* sink, const DriverOptions& opts) {
  cfg.validate();
  Recorder rec(cfg.reindeer_count, cfg.elf_count, sink);
  RunControl ctl;
  SantasShop shop(ctl, rec, cfg.barrier_size, cfg.group_size);

  ActorThreads threads(ctl, opts.deadlock_poll_interval);
  threads.spawn_main([&] {
    for (std::uint64_t t = 0; t < cfg.santa_rounds; ++t) {
      if (shop.wakeup() == SessionKind::Deliver) {
        shop.hitch();
        shop.ride();
      } else {
        for (std::size_t i = 0; i < cfg.group_size; ++i) {
          shop.welcome();
          shop.explain();
        }
      }
    }
  });
  for (std::size_t r = 0; r < cfg.reindeer_count; ++r) {
    threads.spawn([&, id = static_cast<long>(r)] {
      detail::repeat(cfg.reindeer_cycles, [&] {
        shop.back(id);
        shop.harness(id);
        shop.pull(id);
      });
    });
  }
  for (std::size_t e = 0; e < cfg.elf_count; ++e) {
    threads.spawn([&, id = static_cast<long>(e)] {
      detail::repeat(cfg.elf_cycles, [&] {
        shop.puzzled(id);
        shop.enter(id);
        shop.consult(id);
      });
    });
  }

  const auto t0 = std::chrono::steady_clock::now();
  const bool deadlocked = threads.wait();
  const auto t1 = std::chrono::steady_clock::now();

  RunStats stats;
  stats.backend = Backend::Monitor;
  stats.outcome = deadlocked ? Outcome::Deadlocked : Outcome::Completed;
  stats.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
  rec.fill(stats);
  stats.broadcasts = shop.monitor().broadcasts();
  stats.state_changes = shop.monitor().broadcasts();
  stats.wasted_wakeups = shop.monitor().wasted_wakeups();
  stats.sync_operations = ctl.progress_count();
  return stats;
}

}  // namespace northpole::backends
