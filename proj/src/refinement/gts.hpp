#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "refinement/ast.hpp"

namespace northpole::refine {

inline constexpr std::uint64_t kMaxStates = std::uint64_t{1} << 24;

// Mixed-radix numbering of a system's valuations. Throws StructuralError for
// unbounded domains or state counts above kMaxStates.
class StateSpace {
 public:
  explicit StateSpace(const Gts& system);

  std::uint64_t size() const { return size_; }
  std::size_t width() const { return types_.size(); }
  void decode(std::uint64_t index, std::vector<Value>& out) const;
  std::vector<Value> state(std::uint64_t index) const;
  // Valuations outside the domains have no index.
  std::optional<std::uint64_t> index(std::span<const Value> state) const;

 private:
  std::vector<FieldType> types_;
  std::uint64_t size_ = 1;
};

struct DomainError {
  std::size_t field = 0;
  Value value = 0;
};

// Result of running a command body from one pre-state. `branch` spells the
// outcome of every conditional passed, e.g. "T" or "FT"; straight-line
// bodies have the empty branch. A run cut short by a domain error ends its
// branch with '!'.
struct Execution {
  std::vector<Value> state;
  std::vector<std::string> labels;
  std::string branch;
  std::optional<DomainError> domain_error;
};

bool enabled(const Command& c, std::span<const Value> pre);
// Runs the body regardless of the guard. Stops at the first assignment that
// leaves a field's domain.
Execution execute(const Gts& system, const Command& c, std::span<const Value> pre);

// One path through a body, stated over the pre-state: conditions have the
// preceding assignments substituted in.
struct BranchInfo {
  std::string key;
  std::string condition;  // "true" for the only branch of straight-line code
  std::string update;     // composed assignment, or "skip"
  std::vector<std::string> labels;
};

std::vector<BranchInfo> branches(const Gts& system, const Command& c, const SymbolTable& symbols);

std::string format_state(const Gts& system, std::span<const Value> state, const SymbolTable& symbols);

}  // namespace northpole::refine
