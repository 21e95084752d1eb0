#include <atomic>
#include <chrono>

#include "backends/driver.hpp"
#include "backends/emit.hpp"
#include "backends/sync.hpp"

namespace northpole::backends {

using detail::emit;
using trace::EventKind;
using trace::SessionKind;

namespace {

// Every synchronization point is a pair of semaphores: the coordinator posts
// "go", the actor posts "done".
struct Semaphores {
  explicit Semaphores(RunControl& ctl)
      : wakeup(ctl),
        wakeup_reindeer(ctl),
        wakeup_elves(ctl),
        harness(ctl),
        harness_done(ctl),
        pull(ctl),
        pull_done(ctl),
        enter(ctl),
        enter_done(ctl),
        consult(ctl),
        consult_done(ctl),
        reindeer_back(ctl),
        reindeer_back_done(ctl),
        reindeer_harness(ctl),
        reindeer_harness_done(ctl),
        reindeer_pull(ctl),
        reindeer_pull_done(ctl),
        elf_puzzled(ctl),
        elf_puzzled_done(ctl),
        elf_enter(ctl),
        elf_enter_done(ctl),
        elf_consult(ctl),
        elf_consult_done(ctl) {}

  Semaphore wakeup, wakeup_reindeer, wakeup_elves;
  Semaphore harness, harness_done;
  Semaphore pull, pull_done;
  Semaphore enter, enter_done;
  Semaphore consult, consult_done;
  Semaphore reindeer_back, reindeer_back_done;
  Semaphore reindeer_harness, reindeer_harness_done;
  Semaphore reindeer_pull, reindeer_pull_done;
  Semaphore elf_puzzled, elf_puzzled_done;
  Semaphore elf_enter, elf_enter_done;
  Semaphore elf_consult, elf_consult_done;
};

}  // namespace

RunStats run_semaphores(const santa::ScenarioConfig& cfg, trace::EventSink* sink, const DriverOptions& opts) {
  cfg.validate();
  Recorder rec(cfg.reindeer_count, cfg.elf_count, sink);
  RunControl ctl;
  Semaphores sem(ctl);
  std::atomic<bool> b{false};
  // Observation only: set by the shop before it wakes Santa.
  std::atomic<bool> elves_ready{false};
  const std::size_t barrier = cfg.barrier_size;
  const std::size_t group = cfg.group_size;

  ActorThreads threads(ctl, opts.deadlock_poll_interval);
  threads.spawn_main([&] {
    for (std::uint64_t t = 0; t < cfg.santa_rounds; ++t) {
      sem.wakeup.acquire();  // woken by the sleigh or the shop
      const bool back = b.load();
      if (back) {
        detail::decide(rec, true, elves_ready.load(), SessionKind::Deliver);
        b = false;
        sem.wakeup_reindeer.release();
        sem.harness.acquire();
        sem.harness_done.release();
        sem.pull.acquire();
        detail::end_session(rec, SessionKind::Deliver);
        sem.pull_done.release();
      } else {
        detail::decide(rec, false, elves_ready.load(), SessionKind::Help);
        elves_ready = false;
        sem.wakeup_elves.release();
        for (std::size_t i = 0; i < group; ++i) {
          sem.enter.acquire();
          sem.enter_done.release();
          sem.consult.acquire();
          sem.consult_done.release();
        }
        detail::end_session(rec, SessionKind::Help);
      }
    }
  });
  threads.spawn([&] {
    for (;;) {
      for (std::size_t i = 0; i < barrier; ++i) sem.reindeer_back.release();
      for (std::size_t i = 0; i < barrier; ++i) sem.reindeer_back_done.acquire();
      b = true;
      sem.wakeup.release();
      sem.wakeup_reindeer.acquire();
      for (std::size_t i = 0; i < barrier; ++i) sem.reindeer_harness.release();
      for (std::size_t i = 0; i < barrier; ++i) sem.reindeer_harness_done.acquire();
      sem.harness.release();
      sem.harness_done.acquire();
      for (std::size_t i = 0; i < barrier; ++i) sem.reindeer_pull.release();
      for (std::size_t i = 0; i < barrier; ++i) sem.reindeer_pull_done.acquire();
      sem.pull.release();
      sem.pull_done.acquire();
    }
  });
  threads.spawn([&] {
    for (;;) {
      for (std::size_t i = 0; i < group; ++i) sem.elf_puzzled.release();
      for (std::size_t i = 0; i < group; ++i) sem.elf_puzzled_done.acquire();
      elves_ready = true;
      sem.wakeup.release();
      sem.wakeup_elves.acquire();
      for (std::size_t i = 0; i < group; ++i) {
        sem.elf_enter.release();
        sem.elf_enter_done.acquire();
        sem.enter.release();
        sem.enter_done.acquire();
        sem.elf_consult.release();
        sem.elf_consult_done.acquire();
        sem.consult.release();
        sem.consult_done.acquire();
      }
    }
  });
  for (std::size_t r = 0; r < cfg.reindeer_count; ++r) {
    threads.spawn([&, id = static_cast<long>(r)] {
      detail::repeat(cfg.reindeer_cycles, [&] {
        sem.reindeer_back.acquire();
        emit(rec, detail::reindeer(id), EventKind::Back);
        sem.reindeer_back_done.release();
        sem.reindeer_harness.acquire();
        emit(rec, detail::reindeer(id), EventKind::Harness);
        sem.reindeer_harness_done.release();
        sem.reindeer_pull.acquire();
        emit(rec, detail::reindeer(id), EventKind::Pull);
        sem.reindeer_pull_done.release();
      });
    });
  }
  for (std::size_t e = 0; e < cfg.elf_count; ++e) {
    threads.spawn([&, id = static_cast<long>(e)] {
      detail::repeat(cfg.elf_cycles, [&] {
        sem.elf_puzzled.acquire();
        emit(rec, detail::elf(id), EventKind::Puzzled);
        sem.elf_puzzled_done.release();
        sem.elf_enter.acquire();
        emit(rec, detail::elf(id), EventKind::Enter);
        sem.elf_enter_done.release();
        sem.elf_consult.acquire();
        emit(rec, detail::elf(id), EventKind::Consult);
        sem.elf_consult_done.release();
      });
    });
  }

  const auto t0 = std::chrono::steady_clock::now();
  const bool deadlocked = threads.wait();
  const auto t1 = std::chrono::steady_clock::now();

  RunStats stats;
  stats.backend = Backend::Semaphores;
  stats.outcome = deadlocked ? Outcome::Deadlocked : Outcome::Completed;
  stats.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
  rec.fill(stats);
  stats.sync_operations = ctl.progress_count();
  return stats;
}

}  // namespace northpole::backends
