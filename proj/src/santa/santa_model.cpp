#include "santa/santa_model.hpp"

#include <array>
#include <stdexcept>

namespace northpole::santa {

using runtime::ActionDescriptor;
using runtime::CallSite;
using runtime::ClassDescriptor;
using runtime::FieldSpec;
using runtime::MethodDescriptor;
using runtime::Segment;
using runtime::SegmentContext;
using trace::Actor;
using trace::ActorKind;
using trace::EventKind;
using trace::SessionKind;

void ScenarioConfig::validate() const {
  if (barrier_size == 0) throw std::invalid_argument("barrier size must be positive");
  if (group_size == 0) throw std::invalid_argument("group size must be positive");
  if (santa_rounds == 0) throw std::invalid_argument("santa rounds must be positive");
  if (reindeer_cycles && *reindeer_cycles == 0) throw std::invalid_argument("reindeer cycles must be positive");
  if (elf_cycles && *elf_cycles == 0) throw std::invalid_argument("elf cycles must be positive");
}

namespace {

void emit(SegmentContext& ctx, Actor actor, EventKind kind, std::optional<trace::Snapshot> snapshot = std::nullopt,
          std::optional<SessionKind> session = std::nullopt) {
  if (auto* sink = ctx.sink()) {
    trace::TraceEvent ev;
    ev.actor = actor;
    ev.kind = kind;
    ev.snapshot = snapshot;
    ev.session = session;
    sink->append(std::move(ev));
  }
}

// The actor on whose behalf a segment runs: the reindeer or elf whose action
// started the call chain.
Actor caller_of(const SegmentContext& ctx, const ActorMap& actors, ActorKind fallback) {
  if (ctx.origin() < actors.size()) return actors[ctx.origin()];
  return Actor{fallback, 0};
}

std::shared_ptr<ClassDescriptor> make_santa(const ScenarioConfig& cfg) {
  const Value group = static_cast<Value>(cfg.group_size);
  const Actor me{ActorKind::Santa, 0};
  auto cls = std::make_shared<ClassDescriptor>();
  cls->name = "Santa";
  cls->fields = {
      {"s", Domain::enumeration({"Sleeping", "Harnessing", "Riding", "Welcoming", "Consulting"}), santa_state::Sleeping},
      {"b", Domain::boolean(), 0},
      {"p", Domain::range(0, group), 0},
  };
  using namespace santa_field;
  auto in_state = [](Value st) { return [st](std::span<const Value> f) { return f[s] == st; }; };

  cls->methods.push_back({"back", 0, {}, {Segment{[](SegmentContext& x) {
                                          x[b] = 1;
                                          return true;
                                        }}}});
  cls->methods.push_back({"harness", 0, in_state(santa_state::Harnessing), {Segment{[](SegmentContext& x) {
                                                                           x[s] = santa_state::Riding;
                                                                           return true;
                                                                         }}}});
  cls->methods.push_back({"pull", 0, in_state(santa_state::Riding), {Segment{[me](SegmentContext& x) {
                                                                     x[s] = santa_state::Sleeping;
                                                                     x[b] = 0;
                                                                     emit(x, me, EventKind::SessionEnd, std::nullopt,
                                                                          SessionKind::Deliver);
                                                                     return true;
                                                                   }}}});
  cls->methods.push_back({"puzzled", 0, {}, {Segment{[group](SegmentContext& x) {
                                             x[p] = group;
                                             return true;
                                           }}}});
  cls->methods.push_back({"enter", 0, in_state(santa_state::Welcoming), {Segment{[](SegmentContext& x) {
                                                                         x[s] = santa_state::Consulting;
                                                                         return true;
                                                                       }}}});
  cls->methods.push_back({"consult", 0, in_state(santa_state::Consulting), {Segment{[me](SegmentContext& x) {
                                                                            x[p] = x[p] - 1;
                                                                            if (x[p] > 0) {
                                                                              x[s] = santa_state::Welcoming;
                                                                            } else {
                                                                              x[s] = santa_state::Sleeping;
                                                                              emit(x, me, EventKind::SessionEnd,
                                                                                   std::nullopt, SessionKind::Help);
                                                                            }
                                                                            return true;
                                                                          }}}});

  auto decide = [me, group](SegmentContext& x, Value next, SessionKind session) {
    emit(x, me, EventKind::WakeupDecision, trace::Snapshot{x[b] != 0, x[p] == group});
    x[s] = next;
    emit(x, me, EventKind::SessionStart, std::nullopt, session);
    return true;
  };
  cls->actions.push_back({"deliver",
                        [](std::span<const Value> f) { return f[s] == santa_state::Sleeping && f[b] != 0; },
                        {Segment{[decide](SegmentContext& x) {
                          return decide(x, santa_state::Harnessing, SessionKind::Deliver);
                        }}}});
  cls->actions.push_back({"help",
                        [group](std::span<const Value> f) {
                          return f[s] == santa_state::Sleeping && f[p] == group && f[b] == 0;
                        },
                        {Segment{[decide](SegmentContext& x) {
                          return decide(x, santa_state::Welcoming, SessionKind::Help);
                        }}}});
  return cls;
}

// One countdown phase of the sleigh: every reindeer checks in, the last one
// moves the sleigh on and notifies Santa.
MethodDescriptor sleigh_phase(const char* name, Value phase, Value next, EventKind kind, Value barrier,
                              std::shared_ptr<const ActorMap> actors) {
  using namespace sleigh_field;
  MethodDescriptor m;
  m.name = name;
  m.guard = [phase](std::span<const Value> f) { return f[s] == phase; };
  m.body.push_back(Segment{[=](SegmentContext& x) {
                             emit(x, caller_of(x, *actors, ActorKind::Sleigh), kind);
                             x[c] = x[c] - 1;
                             if (x[c] != 0) return false;
                             x[s] = next;
                             x[c] = barrier;
                             return true;
                           },
                           CallSite{0, name, {}}});
  return m;
}

std::shared_ptr<ClassDescriptor> make_sleigh(const ScenarioConfig& cfg, std::shared_ptr<const ActorMap> actors) {
  const Value barrier = static_cast<Value>(cfg.barrier_size);
  auto cls = std::make_shared<ClassDescriptor>();
  cls->name = "Sleigh";
  cls->fields = {{"s", Domain::enumeration({"Back", "Harnessing", "Pulling"}), sleigh_state::Back},
               {"c", Domain::range(0, barrier), barrier}};
  cls->params = {"st"};
  cls->methods.push_back(
      sleigh_phase("back", sleigh_state::Back, sleigh_state::Harnessing, EventKind::Back, barrier, actors));
  cls->methods.push_back(
      sleigh_phase("harness", sleigh_state::Harnessing, sleigh_state::Pulling, EventKind::Harness, barrier, actors));
  cls->methods.push_back(
      sleigh_phase("pull", sleigh_state::Pulling, sleigh_state::Back, EventKind::Pull, barrier, actors));
  return cls;
}

std::shared_ptr<ClassDescriptor> make_shop(const ScenarioConfig& cfg, std::shared_ptr<const ActorMap> actors) {
  using namespace shop_field;
  const Value group = static_cast<Value>(cfg.group_size);
  auto cls = std::make_shared<ClassDescriptor>();
  cls->name = "Shop";
  cls->fields = {{"s", Domain::enumeration({"Puzzled", "Entering", "Consulting"}), shop_state::Puzzled},
               {"c", Domain::range(0, group), 0}};
  cls->params = {"st"};
  auto in_state = [](Value st) { return [st](std::span<const Value> f) { return f[s] == st; }; };

  cls->methods.push_back({"puzzled",
                        0,
                        in_state(shop_state::Puzzled),
                        {Segment{[group, actors](SegmentContext& x) {
                                   emit(x, caller_of(x, *actors, ActorKind::Shop), EventKind::Puzzled);
                                   x[c] = x[c] + 1;
                                   if (x[c] != group) return false;
                                   x[s] = shop_state::Entering;
                                   return true;
                                 },
                                 CallSite{0, "puzzled", {}}}}});
  cls->methods.push_back({"enter",
                        0,
                        in_state(shop_state::Entering),
                        {Segment{[actors](SegmentContext& x) {
                                   emit(x, caller_of(x, *actors, ActorKind::Shop), EventKind::Enter);
                                   x[s] = shop_state::Consulting;
                                   return true;
                                 },
                                 CallSite{0, "enter", {}}}}});
  cls->methods.push_back({"consult",
                        0,
                        in_state(shop_state::Consulting),
                        {Segment{[actors](SegmentContext& x) {
                                   emit(x, caller_of(x, *actors, ActorKind::Shop), EventKind::Consult);
                                   x[c] = x[c] - 1;
                                   x[s] = x[c] > 0 ? shop_state::Entering : shop_state::Puzzled;
                                   return true;
                                 },
                                 CallSite{0, "consult", {}}}}});
  return cls;
}

// An actor that repeatedly calls three methods of its coordinator, for a
// bounded number of cycles when `cycles` is set.
std::shared_ptr<ClassDescriptor> make_worker(const char* name, const char* target, std::array<const char*, 3> calls,
                                             std::optional<std::uint64_t> cycles) {
  auto cls = std::make_shared<ClassDescriptor>();
  cls->name = name;
  cls->params = {target};
  ActionDescriptor a;
  a.name = "cycle";
  Segment first{{}, CallSite{0, calls[0], {}}};
  if (cycles) {
    const Value n = static_cast<Value>(*cycles);
    cls->fields = {{"left", Domain::range(0, n), n}};
    a.guard = [](std::span<const Value> f) { return f[0] > 0; };
    first.update = [](SegmentContext& x) {
      x[0] = x[0] - 1;
      return true;
    };
  }
  a.body.push_back(std::move(first));
  a.body.push_back(Segment{{}, CallSite{0, calls[1], {}}});
  a.body.push_back(Segment{{}, CallSite{0, calls[2], {}}});
  cls->actions.push_back(std::move(a));
  return cls;
}

}  // namespace

Descriptors make_descriptors(const ScenarioConfig& cfg, std::shared_ptr<const ActorMap> actors) {
  cfg.validate();
  Descriptors d;
  d.santa = make_santa(cfg);
  d.sleigh = make_sleigh(cfg, actors);
  d.shop = make_shop(cfg, actors);
  d.reindeer = make_worker("Reindeer", "sl", {"back", "harness", "pull"}, cfg.reindeer_cycles);
  d.elf = make_worker("Elf", "sh", {"puzzled", "enter", "consult"}, cfg.elf_cycles);
  return d;
}

Scenario build_scenario(runtime::Runtime& rt, const ScenarioConfig& cfg) {
  Scenario sc;
  sc.actors = std::make_shared<ActorMap>();
  auto d = make_descriptors(cfg, sc.actors);
  auto record = [&](runtime::ObjectHandle h, Actor a) {
    if (sc.actors->size() <= h.id) sc.actors->resize(h.id + 1, Actor{ActorKind::Santa, 0});
    (*sc.actors)[h.id] = a;
    return h;
  };
  sc.santa = record(rt.create_object(d.santa), Actor{ActorKind::Santa, 0});
  sc.sleigh = record(rt.create_object(d.sleigh, {sc.santa}), Actor{ActorKind::Sleigh, 0});
  sc.shop = record(rt.create_object(d.shop, {sc.santa}), Actor{ActorKind::Shop, 0});
  for (std::size_t i = 0; i < cfg.reindeer_count; ++i) {
    sc.reindeer.push_back(
        record(rt.create_object(d.reindeer, {sc.sleigh}), Actor{ActorKind::Reindeer, static_cast<std::uint32_t>(i)}));
  }
  for (std::size_t i = 0; i < cfg.elf_count; ++i) {
    sc.elves.push_back(
        record(rt.create_object(d.elf, {sc.shop}), Actor{ActorKind::Elf, static_cast<std::uint32_t>(i)}));
  }
  return sc;
}

runtime::StopCondition santa_sleeps(const Scenario& scenario, std::uint64_t rounds) {
  struct Count {
    Value previous = santa_state::Sleeping;
    std::uint64_t sleeps = 0;
  };
  auto state = std::make_shared<Count>();
  return runtime::StopCondition::when(scenario.santa, [state, rounds](std::span<const Value> f) {
    const Value now = f[santa_field::s];
    if (now == santa_state::Sleeping && state->previous != santa_state::Sleeping) ++state->sleeps;
    state->previous = now;
    return state->sleeps >= rounds;
  });
}

}  // namespace northpole::santa
