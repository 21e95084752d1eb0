#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "runtime/runtime.hpp"
#include "trace/trace_event.hpp"

namespace northpole::santa {

struct ScenarioConfig {
  std::size_t reindeer_count = 9;
  std::size_t elf_count = 20;
  std::size_t barrier_size = 9;
  std::size_t group_size = 3;
  std::uint64_t santa_rounds = 10000;
  std::optional<std::uint64_t> reindeer_cycles;  // nullopt: unbounded
  std::optional<std::uint64_t> elf_cycles;

  // Throws std::invalid_argument for zero barrier/group sizes or rounds.
  void validate() const;
};

// Field layouts and enumeration values of the final classes.
namespace santa_field {
inline constexpr std::size_t s = 0, b = 1, p = 2;
}
namespace santa_state {
inline constexpr Value Sleeping = 0, Harnessing = 1, Riding = 2, Welcoming = 3, Consulting = 4;
}
namespace sleigh_field {
inline constexpr std::size_t s = 0, c = 1;
}
namespace sleigh_state {
inline constexpr Value Back = 0, Harnessing = 1, Pulling = 2;
}
namespace shop_field {
inline constexpr std::size_t s = 0, c = 1;
}
namespace shop_state {
inline constexpr Value Puzzled = 0, Entering = 1, Consulting = 2;
}

// Maps runtime object ids to trace actors; filled while the scenario is built.
using ActorMap = std::vector<trace::Actor>;

struct Descriptors {
  std::shared_ptr<const runtime::ClassDescriptor> santa, sleigh, shop, reindeer, elf;
};

Descriptors make_descriptors(const ScenarioConfig& cfg, std::shared_ptr<const ActorMap> actors);

struct Scenario {
  runtime::ObjectHandle santa, sleigh, shop;
  std::vector<runtime::ObjectHandle> reindeer, elves;
  std::shared_ptr<ActorMap> actors;

  std::size_t object_count() const { return 3 + reindeer.size() + elves.size(); }
};

// Creates Santa, the sleigh and the shop, then the reindeer (each calling
// back, harness, pull on the sleigh) and the elves (puzzled, enter, consult
// on the shop), in that order.
Scenario build_scenario(runtime::Runtime& rt, const ScenarioConfig& cfg);

// Stops once Santa has returned to Sleeping `rounds` times.
runtime::StopCondition santa_sleeps(const Scenario& scenario, std::uint64_t rounds);

}  // namespace northpole::santa
