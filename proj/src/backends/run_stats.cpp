#include "backends/run_stats.hpp"

#include <sstream>

namespace northpole::backends {

using trace::ActorKind;
using trace::EventKind;

const char* to_string(Backend backend) {
  switch (backend) {
    case Backend::Guards:
      return "guards";
    case Backend::Semaphores:
      return "semaphores";
    case Backend::Channels:
      return "channels";
    case Backend::Monitor:
      return "monitor";
  }
  return "?";
}

std::optional<Backend> parse_backend(std::string_view name) {
  for (auto b : kAllBackends) {
    if (name == to_string(b)) return b;
  }
  return std::nullopt;
}

const char* to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Completed:
      return "completed";
    case Outcome::Quiescent:
      return "quiescent";
    case Outcome::Deadlocked:
      return "deadlocked";
  }
  return "?";
}

nlohmann::ordered_json to_json(const RunStats& s) {
  nlohmann::ordered_json j;
  j["backend"] = to_string(s.backend);
  j["outcome"] = to_string(s.outcome);
  j["deadlocked"] = s.deadlocked();
  j["deliveries"] = s.deliveries;
  j["help_sessions"] = s.help_sessions;
  j["santa_rounds_completed"] = s.santa_rounds_completed;
  j["wall_time_s"] = s.wall_time_s;
  j["reindeer_events"] = s.reindeer_events;
  j["elf_events"] = s.elf_events;
  nlohmann::ordered_json kinds = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < trace::kEventKindCount; ++i) {
    kinds[trace::to_string(static_cast<EventKind>(i))] = s.kind_counts[i];
  }
  j["event_counts"] = kinds;
  j["sync_operations"] = s.sync_operations;
  j["broadcasts"] = s.broadcasts;
  j["wasted_wakeups"] = s.wasted_wakeups;
  j["state_changes"] = s.state_changes;
  j["guard_rechecks"] = s.guard_rechecks;
  return j;
}

RunStats run_stats_from_json(const nlohmann::json& j) {
  RunStats s;
  auto backend = parse_backend(j.at("backend").get<std::string>());
  if (!backend) throw std::invalid_argument("unknown backend in stats");
  s.backend = *backend;
  const auto outcome = j.at("outcome").get<std::string>();
  if (outcome == "completed") {
    s.outcome = Outcome::Completed;
  } else if (outcome == "quiescent") {
    s.outcome = Outcome::Quiescent;
  } else if (outcome == "deadlocked") {
    s.outcome = Outcome::Deadlocked;
  } else {
    throw std::invalid_argument("unknown outcome '" + outcome + "'");
  }
  s.deliveries = j.at("deliveries").get<std::uint64_t>();
  s.help_sessions = j.at("help_sessions").get<std::uint64_t>();
  s.santa_rounds_completed = j.at("santa_rounds_completed").get<std::uint64_t>();
  s.wall_time_s = j.at("wall_time_s").get<double>();
  s.reindeer_events = j.at("reindeer_events").get<std::vector<std::uint64_t>>();
  s.elf_events = j.at("elf_events").get<std::vector<std::uint64_t>>();
  const auto& kinds = j.at("event_counts");
  for (std::size_t i = 0; i < trace::kEventKindCount; ++i) {
    s.kind_counts[i] = kinds.at(trace::to_string(static_cast<EventKind>(i))).get<std::uint64_t>();
  }
  s.sync_operations = j.value("sync_operations", std::uint64_t{0});
  s.broadcasts = j.value("broadcasts", std::uint64_t{0});
  s.wasted_wakeups = j.value("wasted_wakeups", std::uint64_t{0});
  s.state_changes = j.value("state_changes", std::uint64_t{0});
  s.guard_rechecks = j.value("guard_rechecks", std::uint64_t{0});
  return s;
}

std::string to_text(const RunStats& s) {
  std::ostringstream out;
  out << "backend=" << to_string(s.backend) << " outcome=" << to_string(s.outcome)
      << " rounds=" << s.santa_rounds_completed << " deliveries=" << s.deliveries
      << " help_sessions=" << s.help_sessions << " wall_time_s=" << s.wall_time_s;
  if (s.broadcasts) out << " broadcasts=" << s.broadcasts << " wasted_wakeups=" << s.wasted_wakeups;
  out << '\n';
  return out.str();
}

Recorder::Recorder(std::size_t reindeer, std::size_t elves, trace::EventSink* downstream)
    : reindeer_(reindeer),
      elves_(elves),
      downstream_(downstream),
      actor_counts_(std::make_unique<std::atomic<std::uint64_t>[]>(reindeer + elves)) {}

void Recorder::append(trace::TraceEvent event) {
  kinds_[static_cast<std::size_t>(event.kind)].fetch_add(1, std::memory_order_relaxed);
  if (event.actor.kind == ActorKind::Reindeer && event.actor.id < reindeer_) {
    actor_counts_[event.actor.id].fetch_add(1, std::memory_order_relaxed);
  } else if (event.actor.kind == ActorKind::Elf && event.actor.id < elves_) {
    actor_counts_[reindeer_ + event.actor.id].fetch_add(1, std::memory_order_relaxed);
  }
  if (event.kind == EventKind::SessionEnd && event.session) {
    (*event.session == trace::SessionKind::Deliver ? deliveries_ : help_).fetch_add(1, std::memory_order_relaxed);
  }
  if (downstream_) downstream_->append(std::move(event));
}

void Recorder::fill(RunStats& s) const {
  s.deliveries = deliveries_.load();
  s.help_sessions = help_.load();
  s.santa_rounds_completed = s.deliveries + s.help_sessions;
  s.reindeer_events.assign(reindeer_, 0);
  s.elf_events.assign(elves_, 0);
  for (std::size_t i = 0; i < reindeer_; ++i) s.reindeer_events[i] = actor_counts_[i].load();
  for (std::size_t i = 0; i < elves_; ++i) s.elf_events[i] = actor_counts_[reindeer_ + i].load();
  for (std::size_t i = 0; i < trace::kEventKindCount; ++i) s.kind_counts[i] = kinds_[i].load();
}

}  // namespace northpole::backends
