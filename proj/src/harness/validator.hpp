#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "backends/run_stats.hpp"
#include "trace/trace_event.hpp"

namespace northpole::harness {

enum class Property { P1_priority, P2_barrier, P3_batch, P4_counts };

const char* to_string(Property property);

struct Violation {
  Property property = Property::P1_priority;
  std::uint64_t first_seq = 0;
  std::uint64_t last_seq = 0;
  std::string description;

  bool operator==(const Violation&) const = default;
};

std::string to_string(const Violation& v);

struct ValidatorConfig {
  std::size_t barrier_size = 9;
  std::size_t group_size = 3;
  // Stop recording after this many; the total is still counted.
  std::size_t max_violations = 1000;
};

// Checks a trace one event at a time, so arbitrarily long traces can be
// streamed from disk.
//   P1  a wakeup decision that saw the reindeer back starts a delivery
//   P2  reindeer events form blocks of barrier_size distinct reindeer, in
//       Back, Harness, Pull order, each delivery spanning one block of each
//   P3  elves come in groups of group_size distinct elves, each entering then
//       consulting in turn, with no other elf activity until the group is done
//   P4  Santa's events form decide/start/end sessions, and the totals agree
//       with the run's reported statistics when those are supplied
class TraceValidator {
 public:
  explicit TraceValidator(ValidatorConfig cfg = {});

  // Throws trace::TraceFormatError on non-increasing seq or a decision
  // without its snapshot.
  void feed(const trace::TraceEvent& ev);
  // Ends the trace; returns all recorded violations in trace order.
  std::vector<Violation> finish(const backends::RunStats* stats = nullptr);

  std::uint64_t events_seen() const { return events_; }
  std::uint64_t total_violations() const { return total_violations_; }

 private:
  void report(Property p, std::uint64_t first, std::uint64_t last, std::string description);
  void on_reindeer(const trace::TraceEvent& ev);
  void on_elf(const trace::TraceEvent& ev);
  void on_santa(const trace::TraceEvent& ev);

  ValidatorConfig cfg_;
  std::vector<Violation> violations_;
  std::uint64_t total_violations_ = 0;
  std::uint64_t events_ = 0;
  std::optional<std::uint64_t> last_seq_;

  // Reindeer blocks.
  int phase_ = 0;  // 0 Back, 1 Harness, 2 Pull
  std::set<std::uint32_t> block_members_;
  std::uint64_t block_first_seq_ = 0;
  std::uint64_t blocks_done_[3] = {0, 0, 0};

  // Elf groups.
  enum class GroupPhase { Gathering, AwaitEnter, AwaitConsult };
  GroupPhase group_phase_ = GroupPhase::Gathering;
  std::set<std::uint32_t> group_members_;
  std::set<std::uint32_t> group_served_;
  std::uint32_t consulting_elf_ = 0;
  std::uint64_t group_first_seq_ = 0;
  std::uint64_t groups_gathered_ = 0;
  std::uint64_t groups_done_ = 0;
  bool group_consult_seen_ = false;

  // Santa sessions.
  enum class SantaPhase { Idle, Decided, InSession };
  SantaPhase santa_phase_ = SantaPhase::Idle;
  std::optional<trace::Snapshot> pending_snapshot_;
  std::uint64_t decision_seq_ = 0;
  trace::SessionKind session_ = trace::SessionKind::Deliver;
  std::uint64_t session_seq_ = 0;
  std::uint64_t deliveries_started_ = 0;
  std::uint64_t helps_started_ = 0;
  std::uint64_t deliveries_ended_ = 0;
  std::uint64_t helps_ended_ = 0;

  std::uint64_t kind_counts_[trace::kEventKindCount] = {};
  std::vector<std::uint64_t> reindeer_counts_;
  std::vector<std::uint64_t> elf_counts_;
};

std::vector<Violation> validate_trace(const std::vector<trace::TraceEvent>& events, const ValidatorConfig& cfg = {},
                                      const backends::RunStats* stats = nullptr);
// Streams a JSON-lines trace.
std::vector<Violation> validate_trace(std::istream& in, const ValidatorConfig& cfg = {},
                                      const backends::RunStats* stats = nullptr);

}  // namespace northpole::harness
