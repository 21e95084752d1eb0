#include "harness/validator.hpp"

#include <algorithm>

namespace northpole::harness {

using trace::ActorKind;
using trace::EventKind;
using trace::SessionKind;
using trace::TraceEvent;

const char* to_string(Property property) {
  switch (property) {
    case Property::P1_priority:
      return "P1_priority";
    case Property::P2_barrier:
      return "P2_barrier";
    case Property::P3_batch:
      return "P3_batch";
    case Property::P4_counts:
      return "P4_counts";
  }
  return "?";
}

std::string to_string(const Violation& v) {
  return std::string(to_string(v.property)) + " [" + std::to_string(v.first_seq) + ".." + std::to_string(v.last_seq) +
         "] " + v.description;
}

namespace {

constexpr EventKind kPhaseKinds[3] = {EventKind::Back, EventKind::Harness, EventKind::Pull};

int phase_of(EventKind kind) {
  switch (kind) {
    case EventKind::Back:
      return 0;
    case EventKind::Harness:
      return 1;
    default:
      return 2;
  }
}

void bump(std::vector<std::uint64_t>& counts, std::uint32_t id) {
  if (counts.size() <= id) counts.resize(id + 1, 0);
  ++counts[id];
}

}  // namespace

TraceValidator::TraceValidator(ValidatorConfig cfg) : cfg_(cfg) {
  if (cfg_.barrier_size == 0 || cfg_.group_size == 0) throw std::invalid_argument("barrier and group must be positive");
}

void TraceValidator::report(Property p, std::uint64_t first, std::uint64_t last, std::string description) {
  ++total_violations_;
  if (violations_.size() < cfg_.max_violations) violations_.push_back({p, first, last, std::move(description)});
}

void TraceValidator::feed(const TraceEvent& ev) {
  if (last_seq_ && ev.seq <= *last_seq_) {
    throw trace::TraceFormatError(0, "seq " + std::to_string(ev.seq) + " does not increase (previous " +
                                         std::to_string(*last_seq_) + ")");
  }
  if (ev.kind == EventKind::WakeupDecision && !ev.snapshot) {
    throw trace::TraceFormatError(0, "WakeupDecision at seq " + std::to_string(ev.seq) + " has no snapshot");
  }
  last_seq_ = ev.seq;
  ++events_;
  ++kind_counts_[static_cast<std::size_t>(ev.kind)];
  switch (ev.actor.kind) {
    case ActorKind::Reindeer:
      bump(reindeer_counts_, ev.actor.id);
      on_reindeer(ev);
      break;
    case ActorKind::Elf:
      bump(elf_counts_, ev.actor.id);
      on_elf(ev);
      break;
    case ActorKind::Santa:
      on_santa(ev);
      break;
    default:
      report(Property::P4_counts, ev.seq, ev.seq, "unexpected actor " + trace::to_string(ev.actor));
  }
}

void TraceValidator::on_reindeer(const TraceEvent& ev) {
  if (ev.kind != EventKind::Back && ev.kind != EventKind::Harness && ev.kind != EventKind::Pull) {
    report(Property::P2_barrier, ev.seq, ev.seq,
           trace::to_string(ev.actor) + " emitted " + trace::to_string(ev.kind));
    return;
  }
  const int phase = phase_of(ev.kind);
  if (phase != phase_) {
    report(Property::P2_barrier, block_members_.empty() ? ev.seq : block_first_seq_, ev.seq,
           std::string(trace::to_string(ev.kind)) + " by " + trace::to_string(ev.actor) + " while the " +
               trace::to_string(kPhaseKinds[phase_]) + " block has " + std::to_string(block_members_.size()) + " of " +
               std::to_string(cfg_.barrier_size) + " reindeer");
    return;
  }
  if (block_members_.empty()) block_first_seq_ = ev.seq;
  if (!block_members_.insert(ev.actor.id).second) {
    report(Property::P2_barrier, block_first_seq_, ev.seq,
           trace::to_string(ev.actor) + " appears twice in one " + trace::to_string(ev.kind) + " block");
    return;
  }
  if (block_members_.size() < cfg_.barrier_size) return;

  const std::uint64_t k = ++blocks_done_[phase];
  block_members_.clear();
  phase_ = (phase_ + 1) % 3;
  // The last pull of delivery k needs Santa to have started it.
  if (phase == 2 && deliveries_started_ < k) {
    report(Property::P2_barrier, block_first_seq_, ev.seq,
           "pull block " + std::to_string(k) + " completed before delivery " + std::to_string(k) + " started");
  }
}

void TraceValidator::on_elf(const TraceEvent& ev) {
  const auto id = ev.actor.id;
  const auto who = trace::to_string(ev.actor);
  switch (ev.kind) {
    case EventKind::Puzzled:
      if (group_phase_ != GroupPhase::Gathering) {
        report(Property::P3_batch, group_first_seq_, ev.seq, who + " became puzzled while a group was being served");
        return;
      }
      if (group_members_.empty()) group_first_seq_ = ev.seq;
      if (!group_members_.insert(id).second) {
        report(Property::P3_batch, group_first_seq_, ev.seq, who + " joined the same group twice");
        return;
      }
      if (group_members_.size() == cfg_.group_size) {
        ++groups_gathered_;
        group_phase_ = GroupPhase::AwaitEnter;
        group_consult_seen_ = false;
      }
      return;
    case EventKind::Enter:
      if (group_phase_ != GroupPhase::AwaitEnter) {
        report(Property::P3_batch, group_first_seq_, ev.seq,
               who + (group_phase_ == GroupPhase::Gathering ? " entered before a full group gathered"
                                                            : " entered while another elf was consulting"));
        return;
      }
      if (!group_members_.count(id) || group_served_.count(id)) {
        report(Property::P3_batch, group_first_seq_, ev.seq,
               who + (group_members_.count(id) ? " entered twice in one group" : " entered without being in the group"));
        return;
      }
      consulting_elf_ = id;
      group_phase_ = GroupPhase::AwaitConsult;
      return;
    case EventKind::Consult:
      if (group_phase_ != GroupPhase::AwaitConsult || consulting_elf_ != id) {
        report(Property::P3_batch, group_first_seq_, ev.seq, who + " consulted without entering first");
        return;
      }
      if (!group_consult_seen_) {
        group_consult_seen_ = true;
        if (helps_started_ < groups_gathered_) {
          report(Property::P3_batch, group_first_seq_, ev.seq,
                 "group " + std::to_string(groups_gathered_) + " consulted before its help session started");
        }
      }
      group_served_.insert(id);
      if (group_served_.size() == cfg_.group_size) {
        ++groups_done_;
        group_members_.clear();
        group_served_.clear();
        group_phase_ = GroupPhase::Gathering;
      } else {
        group_phase_ = GroupPhase::AwaitEnter;
      }
      return;
    default:
      report(Property::P3_batch, ev.seq, ev.seq, who + " emitted " + trace::to_string(ev.kind));
  }
}

void TraceValidator::on_santa(const TraceEvent& ev) {
  switch (ev.kind) {
    case EventKind::WakeupDecision:
      if (santa_phase_ != SantaPhase::Idle) {
        report(Property::P4_counts, session_seq_, ev.seq, "wakeup decision inside an unfinished session");
      }
      santa_phase_ = SantaPhase::Decided;
      pending_snapshot_ = ev.snapshot;
      decision_seq_ = ev.seq;
      return;
    case EventKind::SessionStart: {
      if (santa_phase_ != SantaPhase::Decided) {
        report(Property::P4_counts, ev.seq, ev.seq, "session started without a wakeup decision");
      }
      const auto kind = ev.session.value_or(SessionKind::Deliver);
      if (pending_snapshot_ && pending_snapshot_->reindeer_back && kind != SessionKind::Deliver) {
        report(Property::P1_priority, decision_seq_, ev.seq, "reindeer were back but Santa chose to help elves");
      }
      if (kind == SessionKind::Deliver) {
        const std::uint64_t k = ++deliveries_started_;
        if (blocks_done_[0] < k) {
          report(Property::P2_barrier, decision_seq_, ev.seq,
                 "delivery " + std::to_string(k) + " started with only " + std::to_string(blocks_done_[0]) +
                     " complete Back block(s)");
        }
      } else {
        const std::uint64_t k = ++helps_started_;
        if (groups_gathered_ < k) {
          report(Property::P3_batch, decision_seq_, ev.seq,
                 "help session " + std::to_string(k) + " started before group " + std::to_string(k) + " gathered");
        }
      }
      santa_phase_ = SantaPhase::InSession;
      session_ = kind;
      session_seq_ = ev.seq;
      pending_snapshot_.reset();
      return;
    }
    case EventKind::SessionEnd: {
      const auto kind = ev.session.value_or(SessionKind::Deliver);
      if (santa_phase_ != SantaPhase::InSession || kind != session_) {
        report(Property::P4_counts, session_seq_, ev.seq, "session end does not match an open session");
      }
      if (kind == SessionKind::Deliver) {
        const std::uint64_t k = ++deliveries_ended_;
        if (blocks_done_[2] < k) {
          report(Property::P2_barrier, session_seq_, ev.seq,
                 "delivery " + std::to_string(k) + " ended before its Pull block completed");
        }
      } else {
        const std::uint64_t k = ++helps_ended_;
        if (groups_done_ < k) {
          report(Property::P3_batch, session_seq_, ev.seq,
                 "help session " + std::to_string(k) + " ended before every member of its group consulted");
        }
      }
      santa_phase_ = SantaPhase::Idle;
      return;
    }
    default:
      report(Property::P4_counts, ev.seq, ev.seq, std::string("Santa emitted ") + trace::to_string(ev.kind));
  }
}

std::vector<Violation> TraceValidator::finish(const backends::RunStats* stats) {
  if (stats) {
    const std::uint64_t last = last_seq_.value_or(0);
    auto mismatch = [&](const std::string& what, std::uint64_t in_trace, std::uint64_t reported) {
      if (in_trace != reported) {
        report(Property::P4_counts, 0, last,
               what + ": trace has " + std::to_string(in_trace) + ", statistics report " + std::to_string(reported));
      }
    };
    mismatch("deliveries", deliveries_ended_, stats->deliveries);
    mismatch("help sessions", helps_ended_, stats->help_sessions);
    mismatch("completed rounds", deliveries_ended_ + helps_ended_, stats->santa_rounds_completed);
    for (std::size_t i = 0; i < trace::kEventKindCount; ++i) {
      mismatch(std::string(trace::to_string(static_cast<EventKind>(i))) + " events", kind_counts_[i],
               stats->kind_counts[i]);
    }
    auto per_actor = [&](const char* name, std::vector<std::uint64_t> in_trace, std::vector<std::uint64_t> reported) {
      const std::size_t n = std::max(in_trace.size(), reported.size());
      in_trace.resize(n, 0);
      reported.resize(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        mismatch(std::string(name) + ":" + std::to_string(i) + " events", in_trace[i], reported[i]);
      }
    };
    per_actor("reindeer", reindeer_counts_, stats->reindeer_events);
    per_actor("elf", elf_counts_, stats->elf_events);
  }
  std::stable_sort(violations_.begin(), violations_.end(),
                   [](const Violation& a, const Violation& b) { return a.last_seq < b.last_seq; });
  return violations_;
}

std::vector<Violation> validate_trace(const std::vector<TraceEvent>& events, const ValidatorConfig& cfg,
                                      const backends::RunStats* stats) {
  TraceValidator v(cfg);
  for (const auto& ev : events) v.feed(ev);
  return v.finish(stats);
}

std::vector<Violation> validate_trace(std::istream& in, const ValidatorConfig& cfg, const backends::RunStats* stats) {
  TraceValidator v(cfg);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto ev = trace::parse_json_line(line, line_number);
    try {
      v.feed(ev);
    } catch (const trace::TraceFormatError& e) {
      throw trace::TraceFormatError(line_number, e.what());
    }
  }
  return v.finish(stats);
}

}  // namespace northpole::harness
