#include "trace/trace_event.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace northpole::trace {

namespace {

constexpr std::array<const char*, kEventKindCount> kKindNames = {
    "Back", "Harness", "Pull", "Puzzled", "Enter", "Consult", "WakeupDecision", "SessionStart", "SessionEnd"};

}  // namespace

const char* to_string(EventKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

const char* to_string(SessionKind kind) { return kind == SessionKind::Deliver ? "deliver" : "help"; }

std::string to_string(const Actor& actor) {
  switch (actor.kind) {
    case ActorKind::Santa:
      return "santa";
    case ActorKind::Sleigh:
      return "sleigh";
    case ActorKind::Shop:
      return "shop";
    case ActorKind::Reindeer:
      return "reindeer:" + std::to_string(actor.id);
    case ActorKind::Elf:
      return "elf:" + std::to_string(actor.id);
  }
  return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (text == kKindNames[i]) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

std::optional<Actor> parse_actor(std::string_view text) {
  if (text == "santa") return Actor{ActorKind::Santa, 0};
  if (text == "sleigh") return Actor{ActorKind::Sleigh, 0};
  if (text == "shop") return Actor{ActorKind::Shop, 0};
  auto colon = text.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  auto prefix = text.substr(0, colon);
  auto digits = text.substr(colon + 1);
  Actor actor;
  if (prefix == "reindeer") {
    actor.kind = ActorKind::Reindeer;
  } else if (prefix == "elf") {
    actor.kind = ActorKind::Elf;
  } else {
    return std::nullopt;
  }
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), actor.id);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) return std::nullopt;
  return actor;
}

TraceFormatError::TraceFormatError(std::size_t line, const std::string& message)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

std::string to_json_line(const TraceEvent& event) {
  nlohmann::ordered_json j;
  j["seq"] = event.seq;
  j["actor"] = to_string(event.actor);
  j["kind"] = to_string(event.kind);
  if (event.snapshot) j["snapshot"] = {{"b", event.snapshot->reindeer_back}, {"elves_ready", event.snapshot->elves_ready}};
  if (event.session) j["session"] = to_string(*event.session);
  return j.dump();
}

TraceEvent parse_json_line(std::string_view line, std::size_t line_number) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw TraceFormatError(line_number, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw TraceFormatError(line_number, "event must be a JSON object");
  TraceEvent ev;
  try {
    if (!j.contains("seq") || !j["seq"].is_number_unsigned()) throw TraceFormatError(line_number, "missing or invalid seq");
    ev.seq = j["seq"].get<std::uint64_t>();
    if (!j.contains("actor") || !j["actor"].is_string()) throw TraceFormatError(line_number, "missing actor");
    auto actor = parse_actor(j["actor"].get<std::string>());
    if (!actor) throw TraceFormatError(line_number, "unknown actor '" + j["actor"].get<std::string>() + "'");
    ev.actor = *actor;
    if (!j.contains("kind") || !j["kind"].is_string()) throw TraceFormatError(line_number, "missing kind");
    auto kind = parse_event_kind(j["kind"].get<std::string>());
    if (!kind) throw TraceFormatError(line_number, "unknown kind '" + j["kind"].get<std::string>() + "'");
    ev.kind = *kind;
    if (j.contains("snapshot")) {
      const auto& s = j["snapshot"];
      ev.snapshot = Snapshot{s.at("b").get<bool>(), s.at("elves_ready").get<bool>()};
    }
    if (j.contains("session")) {
      auto name = j["session"].get<std::string>();
      if (name == "deliver") {
        ev.session = SessionKind::Deliver;
      } else if (name == "help") {
        ev.session = SessionKind::Help;
      } else {
        throw TraceFormatError(line_number, "unknown session '" + name + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw TraceFormatError(line_number, std::string("invalid field: ") + e.what());
  }
  if (ev.kind == EventKind::WakeupDecision && !ev.snapshot) {
    throw TraceFormatError(line_number, "WakeupDecision without snapshot");
  }
  if ((ev.kind == EventKind::SessionStart || ev.kind == EventKind::SessionEnd) && !ev.session) {
    throw TraceFormatError(line_number, std::string(to_string(ev.kind)) + " without session");
  }
  return ev;
}

std::vector<TraceEvent> read_jsonl(std::istream& in) {
  std::vector<TraceEvent> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto ev = parse_json_line(line, line_number);
    if (!out.empty() && ev.seq <= out.back().seq) {
      throw TraceFormatError(line_number, "seq " + std::to_string(ev.seq) + " does not increase (previous " +
                                              std::to_string(out.back().seq) + ")");
    }
    out.push_back(std::move(ev));
  }
  return out;
}

std::vector<TraceEvent> read_jsonl_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TraceFormatError(0, "cannot open trace file '" + path + "'");
  return read_jsonl(in);
}

void write_jsonl(std::ostream& out, const std::vector<TraceEvent>& events) {
  for (const auto& ev : events) out << to_json_line(ev) << '\n';
}

void SequencedSink::append(TraceEvent event) {
  std::lock_guard lk(mu_);
  event.seq = next_++;
  record(event);
}

std::uint64_t SequencedSink::last_seq() const {
  std::lock_guard lk(mu_);
  return next_ - 1;
}

void JsonlSink::record(const TraceEvent& event) { out_ << to_json_line(event) << '\n'; }

}  // namespace northpole::trace
