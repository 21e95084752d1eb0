#pragma once

#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace northpole::trace {

enum class ActorKind { Santa, Sleigh, Shop, Reindeer, Elf };

struct Actor {
  ActorKind kind = ActorKind::Santa;
  std::uint32_t id = 0;  // meaningful for reindeer and elves only

  bool operator==(const Actor&) const = default;
};

enum class EventKind { Back, Harness, Pull, Puzzled, Enter, Consult, WakeupDecision, SessionStart, SessionEnd };

enum class SessionKind { Deliver, Help };

// Santa's view of the world at a wakeup decision.
struct Snapshot {
  bool reindeer_back = false;
  bool elves_ready = false;

  bool operator==(const Snapshot&) const = default;
};

struct TraceEvent {
  std::uint64_t seq = 0;
  Actor actor;
  EventKind kind = EventKind::Back;
  std::optional<Snapshot> snapshot;    // WakeupDecision only
  std::optional<SessionKind> session;  // SessionStart / SessionEnd only

  bool operator==(const TraceEvent&) const = default;
};

inline constexpr std::size_t kEventKindCount = 9;

const char* to_string(EventKind kind);
const char* to_string(SessionKind kind);
std::string to_string(const Actor& actor);
std::optional<EventKind> parse_event_kind(std::string_view text);
std::optional<Actor> parse_actor(std::string_view text);

// Malformed trace input: bad JSON, unknown names, missing snapshot,
// non-increasing sequence numbers.
class TraceFormatError : public std::runtime_error {
 public:
  TraceFormatError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

std::string to_json_line(const TraceEvent& event);
TraceEvent parse_json_line(std::string_view line, std::size_t line_number = 0);
// Reads a whole JSON-lines trace; blank lines are skipped.
std::vector<TraceEvent> read_jsonl(std::istream& in);
std::vector<TraceEvent> read_jsonl_file(const std::string& path);
void write_jsonl(std::ostream& out, const std::vector<TraceEvent>& events);

// Receives scenario events from any thread.
class EventSink {
 public:
  virtual ~EventSink() = default;
  virtual void append(TraceEvent event) = 0;
};

// Serializes appends and stamps each event with the next sequence number.
class SequencedSink : public EventSink {
 public:
  void append(TraceEvent event) final;
  std::uint64_t last_seq() const;

 protected:
  virtual void record(const TraceEvent& event) = 0;

 private:
  mutable std::mutex mu_;
  std::uint64_t next_ = 1;
};

class MemorySink : public SequencedSink {
 public:
  // Not synchronized with concurrent appends; read after the run.
  const std::vector<TraceEvent>& events() const { return events_; }

 protected:
  void record(const TraceEvent& event) override { events_.push_back(event); }

 private:
  std::vector<TraceEvent> events_;
};

class JsonlSink : public SequencedSink {
 public:
  explicit JsonlSink(std::ostream& out) : out_(out) {}

 protected:
  void record(const TraceEvent& event) override;

 private:
  std::ostream& out_;
};

}  // namespace northpole::trace
