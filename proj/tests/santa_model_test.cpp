#include <doctest.h>

#include <chrono>
#include <future>

#include "runtime/runtime.hpp"
#include "santa/santa_model.hpp"
#include "trace/trace_event.hpp"

using namespace northpole;
using namespace northpole::santa;
using runtime::ObjectHandle;
using runtime::Runtime;
using trace::EventKind;
using trace::SessionKind;

namespace {

struct Counts {
  std::uint64_t deliveries = 0;
  std::uint64_t helps = 0;
};

Counts session_ends(const std::vector<trace::TraceEvent>& events) {
  Counts c;
  for (const auto& e : events) {
    if (e.kind != EventKind::SessionEnd) continue;
    (*e.session == SessionKind::Deliver ? c.deliveries : c.helps)++;
  }
  return c;
}

// Santa plus one coordinator, driven by external calls.
struct Bench {
  trace::MemorySink sink;
  Runtime rt{{}, &sink};
  ScenarioConfig cfg;
  std::shared_ptr<ActorMap> actors = std::make_shared<ActorMap>();
  Descriptors d = make_descriptors(cfg, actors);
  ObjectHandle santa = rt.create_object(d.santa);

  Bench() { rt.start(); }
  ~Bench() { rt.halt(); }

  // Santa's actions run on the workers; wait for them to settle.
  std::vector<Value> settled(ObjectHandle h, Value want_s, std::size_t field = 0) {
    for (int i = 0; i < 2000; ++i) {
      auto f = rt.fields(h);
      if (f[field] == want_s) return f;
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    return rt.fields(h);
  }
};

}  // namespace

TEST_CASE("default configuration builds 32 objects") {
  Runtime rt;
  ScenarioConfig cfg;
  auto sc = build_scenario(rt, cfg);
  CHECK(sc.object_count() == 32);
  CHECK(sc.reindeer.size() == 9);
  CHECK(sc.elves.size() == 20);
  CHECK(sc.actors->at(sc.reindeer[4].id) == trace::Actor{trace::ActorKind::Reindeer, 4});
  CHECK(sc.actors->at(sc.elves[19].id) == trace::Actor{trace::ActorKind::Elf, 19});
  CHECK(rt.fields(sc.shop) == std::vector<Value>{shop_state::Puzzled, 0});
}

TEST_CASE("invalid configurations are rejected") {
  ScenarioConfig cfg;
  cfg.barrier_size = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.group_size = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.santa_rounds = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.reindeer_cycles = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("Santa delivers: back, harness, pull") {
  Bench t;
  t.rt.call(t.santa, "back");
  auto f = t.settled(t.santa, santa_state::Harnessing);
  CHECK(f[santa_field::s] == santa_state::Harnessing);
  CHECK(f[santa_field::b] == 1);
  t.rt.call(t.santa, "harness");
  CHECK(t.rt.fields(t.santa)[santa_field::s] == santa_state::Riding);
  t.rt.call(t.santa, "pull");
  f = t.rt.fields(t.santa);
  CHECK(f[santa_field::s] == santa_state::Sleeping);
  CHECK(f[santa_field::b] == 0);
}

TEST_CASE("Santa helps a group of three: consult counts p down") {
  Bench t;
  t.rt.call(t.santa, "puzzled");
  auto f = t.settled(t.santa, santa_state::Welcoming);
  CHECK(f[santa_field::s] == santa_state::Welcoming);
  CHECK(f[santa_field::p] == 3);
  t.rt.call(t.santa, "enter");
  CHECK(t.rt.fields(t.santa) == std::vector<Value>{santa_state::Consulting, 0, 3});
  t.rt.call(t.santa, "consult");
  CHECK(t.rt.fields(t.santa) == std::vector<Value>{santa_state::Welcoming, 0, 2});
  t.rt.call(t.santa, "enter");
  t.rt.call(t.santa, "consult");
  CHECK(t.rt.fields(t.santa) == std::vector<Value>{santa_state::Welcoming, 0, 1});
  t.rt.call(t.santa, "enter");
  t.rt.call(t.santa, "consult");
  CHECK(t.rt.fields(t.santa) == std::vector<Value>{santa_state::Sleeping, 0, 0});
  auto c = session_ends(t.sink.events());
  CHECK(c.helps == 1);
  CHECK(c.deliveries == 0);
}

TEST_CASE("the sleigh counts nine reindeer per phase and notifies Santa once") {
  Bench t;
  auto sleigh = t.rt.create_object(t.d.sleigh, {t.santa});
  for (int i = 0; i < 8; ++i) t.rt.call(sleigh, "back");
  CHECK(t.rt.fields(sleigh) == std::vector<Value>{sleigh_state::Back, 1});
  CHECK(t.rt.fields(t.santa)[santa_field::b] == 0);
  t.rt.call(sleigh, "back");
  CHECK(t.rt.fields(sleigh) == std::vector<Value>{sleigh_state::Harnessing, 9});
  CHECK(t.rt.fields(t.santa)[santa_field::b] == 1);

  // A tenth reindeer waits for the next phase.
  auto late = t.rt.call_async(sleigh, "back");
  CHECK(late.wait_for(std::chrono::milliseconds(30)) == std::future_status::timeout);

  t.settled(t.santa, santa_state::Harnessing);
  for (int i = 0; i < 9; ++i) t.rt.call(sleigh, "harness");
  CHECK(t.rt.fields(t.santa)[santa_field::s] == santa_state::Riding);
  for (int i = 0; i < 9; ++i) t.rt.call(sleigh, "pull");
  CHECK(late.wait_for(std::chrono::seconds(10)) == std::future_status::ready);
  CHECK(t.rt.fields(sleigh) == std::vector<Value>{sleigh_state::Back, 8});
  CHECK(t.rt.fields(t.santa)[santa_field::s] == santa_state::Sleeping);

  std::vector<EventKind> santa_events;
  for (const auto& e : t.sink.events()) {
    if (e.actor.kind == trace::ActorKind::Santa) santa_events.push_back(e.kind);
  }
  CHECK(santa_events == std::vector<EventKind>{EventKind::WakeupDecision, EventKind::SessionStart,
                                               EventKind::SessionEnd});
  CHECK(session_ends(t.sink.events()).deliveries == 1);
}

TEST_CASE("the shop batches three elves") {
  Bench t;
  auto shop = t.rt.create_object(t.d.shop, {t.santa});
  t.rt.call(shop, "puzzled");
  t.rt.call(shop, "puzzled");
  CHECK(t.rt.fields(shop) == std::vector<Value>{shop_state::Puzzled, 2});
  t.rt.call(shop, "puzzled");
  CHECK(t.rt.fields(shop) == std::vector<Value>{shop_state::Entering, 3});
  CHECK(t.rt.fields(t.santa)[santa_field::p] == 3);

  t.rt.call(shop, "enter");
  CHECK(t.rt.fields(shop) == std::vector<Value>{shop_state::Consulting, 3});
  t.rt.call(shop, "consult");
  CHECK(t.rt.fields(shop) == std::vector<Value>{shop_state::Entering, 2});
  t.rt.call(shop, "enter");
  t.rt.call(shop, "consult");
  t.rt.call(shop, "enter");
  t.rt.call(shop, "consult");
  CHECK(t.rt.fields(shop) == std::vector<Value>{shop_state::Puzzled, 0});
  CHECK(t.rt.fields(t.santa)[santa_field::s] == santa_state::Sleeping);
}

namespace {

struct ScenarioRun {
  runtime::RunOutcome outcome;
  Counts counts;
  std::vector<trace::TraceEvent> events;
};

ScenarioRun run(const ScenarioConfig& cfg) {
  trace::MemorySink sink;
  Runtime rt({}, &sink);
  auto sc = build_scenario(rt, cfg);
  ScenarioRun r;
  r.outcome = rt.run(santa_sleeps(sc, cfg.santa_rounds));
  r.events = sink.events();
  r.counts = session_ends(r.events);
  return r;
}

}  // namespace

TEST_CASE("one delivery in five at 100 rounds with 20 reindeer cycles") {
  ScenarioConfig cfg;
  cfg.santa_rounds = 100;
  cfg.reindeer_cycles = 20;
  auto r = run(cfg);
  CHECK(r.outcome == runtime::RunOutcome::Stopped);
  CHECK(r.counts.deliveries == 20);
  CHECK(r.counts.helps == 80);
}

TEST_CASE("help is only chosen when the reindeer are not back") {
  ScenarioConfig cfg;
  cfg.santa_rounds = 300;
  auto r = run(cfg);
  CHECK(r.counts.deliveries + r.counts.helps == 300);
  std::optional<trace::Snapshot> last;
  for (const auto& e : r.events) {
    if (e.kind == EventKind::WakeupDecision) last = e.snapshot;
    if (e.kind == EventKind::SessionStart) {
      REQUIRE(last.has_value());
      if (*e.session == SessionKind::Help) {
        CHECK_FALSE(last->reindeer_back);
        CHECK(last->elves_ready);
      } else {
        CHECK(last->reindeer_back);
      }
    }
  }
}

TEST_CASE("degenerate populations") {
  SUBCASE("no reindeer: Santa only helps") {
    ScenarioConfig cfg;
    cfg.reindeer_count = 0;
    cfg.elf_count = 3;
    cfg.santa_rounds = 50;
    auto r = run(cfg);
    CHECK(r.counts.deliveries == 0);
    CHECK(r.counts.helps == 50);
  }
  SUBCASE("no elves: Santa only delivers") {
    ScenarioConfig cfg;
    cfg.elf_count = 0;
    cfg.santa_rounds = 50;
    auto r = run(cfg);
    CHECK(r.counts.deliveries == 50);
    CHECK(r.counts.helps == 0);
  }
  SUBCASE("eight reindeer never fill a barrier of nine") {
    ScenarioConfig cfg;
    cfg.reindeer_count = 8;
    cfg.santa_rounds = 1000;
    auto r = run(cfg);
    CHECK(r.outcome == runtime::RunOutcome::Stopped);
    CHECK(r.counts.deliveries == 0);
    CHECK(r.counts.helps == 1000);
  }
  SUBCASE("smaller barrier and group") {
    ScenarioConfig cfg;
    cfg.reindeer_count = 4;
    cfg.barrier_size = 4;
    cfg.elf_count = 5;
    cfg.group_size = 2;
    cfg.santa_rounds = 60;
    cfg.reindeer_cycles = 12;
    auto r = run(cfg);
    CHECK(r.counts.deliveries == 12);
    CHECK(r.counts.helps == 48);
  }
}
