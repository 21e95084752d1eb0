#pragma once

#include <optional>

#include "trace/trace_event.hpp"

namespace northpole::backends::detail {

inline trace::Actor reindeer(long id) { return {trace::ActorKind::Reindeer, static_cast<std::uint32_t>(id)}; }
inline trace::Actor elf(long id) { return {trace::ActorKind::Elf, static_cast<std::uint32_t>(id)}; }
inline constexpr trace::Actor kSanta{trace::ActorKind::Santa, 0};

inline void emit(trace::EventSink& sink, trace::Actor actor, trace::EventKind kind,
                 std::optional<trace::Snapshot> snapshot = std::nullopt,
                 std::optional<trace::SessionKind> session = std::nullopt) {
  trace::TraceEvent ev;
  ev.actor = actor;
  ev.kind = kind;
  ev.snapshot = snapshot;
  ev.session = session;
  sink.append(std::move(ev));
}

inline void decide(trace::EventSink& sink, bool reindeer_back, bool elves_ready, trace::SessionKind session) {
  emit(sink, kSanta, trace::EventKind::WakeupDecision, trace::Snapshot{reindeer_back, elves_ready});
  emit(sink, kSanta, trace::EventKind::SessionStart, std::nullopt, session);
}

inline void end_session(trace::EventSink& sink, trace::SessionKind session) {
  emit(sink, kSanta, trace::EventKind::SessionEnd, std::nullopt, session);
}

// Runs `body` `cycles` times, or forever when unset.
template <class F>
void repeat(std::optional<std::uint64_t> cycles, F body) {
  if (!cycles) {
    for (;;) body();
  }
  for (std::uint64_t i = 0; i < *cycles; ++i) body();
}

}  // namespace northpole::backends::detail
