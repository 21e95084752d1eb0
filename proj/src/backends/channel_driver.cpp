#include <array>
#include <chrono>

#include "backends/driver.hpp"
#include "backends/emit.hpp"
#include "backends/sync.hpp"

namespace northpole::backends {

using detail::emit;
using trace::EventKind;
using trace::SessionKind;

RunStats run_channels(const santa::ScenarioConfig& cfg, trace::EventSink* sink, const DriverOptions& opts) {
  cfg.validate();
  Recorder rec(cfg.reindeer_count, cfg.elf_count, sink);
  RunControl ctl;
  ChannelHub hub(ctl);
  Channel reindeer_back(hub), reindeer_harness(hub), reindeer_pull(hub);
  Channel back(hub), harness(hub), pull(hub);
  Channel elf_puzzled(hub), elf_enter(hub), elf_consult(hub);
  Channel puzzled(hub), enter(hub), consult(hub);
  const std::size_t barrier = cfg.barrier_size;
  const std::size_t group = cfg.group_size;

  ActorThreads threads(ctl, opts.deadlock_poll_interval);
  threads.spawn_main([&] {
    bool b = false;  // reindeer back
    bool p = false;  // elves puzzled
    const std::array<Channel*, 2> either = {&back, &puzzled};
    for (std::uint64_t t = 0; t < cfg.santa_rounds; ++t) {
      if (!p) {
        if (hub.select(either).index == 0) {
          b = true;
        } else {
          p = true;
        }
      }
      // Elves are waiting; give reindeer that are already back precedence.
      if (p && back.try_recv()) b = true;
      if (b) {
        detail::decide(rec, b, p, SessionKind::Deliver);
        harness.recv();
        pull.recv();
        b = false;
        detail::end_session(rec, SessionKind::Deliver);
      } else {
        detail::decide(rec, b, p, SessionKind::Help);
        for (std::size_t i = 0; i < group; ++i) {
          enter.recv();
          consult.recv();
        }
        p = false;
        detail::end_session(rec, SessionKind::Help);
      }
    }
  });
  threads.spawn([&] {
    for (;;) {
      for (std::size_t i = 0; i < barrier; ++i) emit(rec, detail::reindeer(reindeer_back.recv()), EventKind::Back);
      back.send(1);
      for (std::size_t i = 0; i < barrier; ++i) {
        emit(rec, detail::reindeer(reindeer_harness.recv()), EventKind::Harness);
      }
      harness.send(1);
      for (std::size_t i = 0; i < barrier; ++i) emit(rec, detail::reindeer(reindeer_pull.recv()), EventKind::Pull);
      pull.send(1);
    }
  });
  threads.spawn([&] {
    for (;;) {
      for (std::size_t i = 0; i < group; ++i) emit(rec, detail::elf(elf_puzzled.recv()), EventKind::Puzzled);
      puzzled.send(1);
      for (std::size_t i = 0; i < group; ++i) {
        emit(rec, detail::elf(elf_enter.recv()), EventKind::Enter);
        enter.send(1);
        emit(rec, detail::elf(elf_consult.recv()), EventKind::Consult);
        consult.send(1);
      }
    }
  });
  for (std::size_t r = 0; r < cfg.reindeer_count; ++r) {
    threads.spawn([&, id = static_cast<long>(r)] {
      detail::repeat(cfg.reindeer_cycles, [&] {
        reindeer_back.send(id);
        reindeer_harness.send(id);
        reindeer_pull.send(id);
      });
    });
  }
  for (std::size_t e = 0; e < cfg.elf_count; ++e) {
    threads.spawn([&, id = static_cast<long>(e)] {
      detail::repeat(cfg.elf_cycles, [&] {
        elf_puzzled.send(id);
        elf_enter.send(id);
        elf_consult.send(id);
      });
    });
  }

  const auto t0 = std::chrono::steady_clock::now();
  const bool deadlocked = threads.wait();
  const auto t1 = std::chrono::steady_clock::now();

  RunStats stats;
  stats.backend = Backend::Channels;
  stats.outcome = deadlocked ? Outcome::Deadlocked : Outcome::Completed;
  stats.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
  rec.fill(stats);
  stats.sync_operations = ctl.progress_count();
  return stats;
}

}  // namespace northpole::backends
