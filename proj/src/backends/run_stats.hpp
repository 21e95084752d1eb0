#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "trace/trace_event.hpp"

namespace northpole::backends {

enum class Backend { Guards, Semaphores, Channels, Monitor };

const char* to_string(Backend backend);
std::optional<Backend> parse_backend(std::string_view name);
inline constexpr std::array<Backend, 4> kAllBackends = {Backend::Guards, Backend::Semaphores, Backend::Channels,
                                                        Backend::Monitor};

enum class Outcome { Completed, Quiescent, Deadlocked };
const char* to_string(Outcome outcome);

struct RunStats {
  Backend backend = Backend::Guards;
  Outcome outcome = Outcome::Completed;
  std::uint64_t deliveries = 0;
  std::uint64_t help_sessions = 0;
  std::uint64_t santa_rounds_completed = 0;
  double wall_time_s = 0.0;
  // Events attributed to each reindeer / elf, indexed by actor id.
  std::vector<std::uint64_t> reindeer_events;
  std::vector<std::uint64_t> elf_events;
  std::array<std::uint64_t, trace::kEventKindCount> kind_counts{};
  // Synchronization cost counters; zero where a backend has no such notion.
  std::uint64_t sync_operations = 0;
  std::uint64_t broadcasts = 0;
  std::uint64_t wasted_wakeups = 0;
  std::uint64_t state_changes = 0;
  std::uint64_t guard_rechecks = 0;

  bool deadlocked() const { return outcome == Outcome::Deadlocked; }
  std::uint64_t kind_count(trace::EventKind kind) const { return kind_counts[static_cast<std::size_t>(kind)]; }
};

nlohmann::ordered_json to_json(const RunStats& stats);
RunStats run_stats_from_json(const nlohmann::json& j);
std::string to_text(const RunStats& stats);

// Counts every event it sees and forwards it to an optional downstream sink.
// Backends always emit through one, so counts are available with tracing off.
class Recorder : public trace::EventSink {
 public:
  Recorder(std::size_t reindeer, std::size_t elves, trace::EventSink* downstream);

  void append(trace::TraceEvent event) override;
  // Copies the counters into `stats` (session and per-actor fields).
  void fill(RunStats& stats) const;

 private:
  std::size_t reindeer_;
  std::size_t elves_;
  trace::EventSink* downstream_;
  std::unique_ptr<std::atomic<std::uint64_t>[]> actor_counts_;
  std::array<std::atomic<std::uint64_t>, trace::kEventKindCount> kinds_{};
  std::atomic<std::uint64_t> deliveries_{0};
  std::atomic<std::uint64_t> help_{0};
};

}  // namespace northpole::backends
