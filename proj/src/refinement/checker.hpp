#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "refinement/ast.hpp"
#include "refinement/mapping.hpp"

namespace northpole::refine {

// Which coupled pairs the M/N/A conditions quantify over: every pair the
// relation admits, or only the pairs reachable from the initial pair when
// each concrete step is matched by its chosen abstract step.
enum class Scope { AllPairs, Reachable };

enum class ConditionKind { I, M, N, A };

// I: initial valuations related. Domain: an update leaves a field's domain.
// Guard: abstract guard false. Labels: emitted calls differ (a stutter must
// emit none). Coupling: the post-states are not related.
enum class Clause { Init, Domain, Guard, Labels, Coupling };

enum class Status { Pass, Fail, Unknown };

const char* to_string(Scope s);
const char* to_string(ConditionKind k);
const char* to_string(Clause c);
const char* to_string(Status s);
const char* to_string(MappingMode m);
Scope parse_scope(const std::string& s);

struct CheckOptions {
  Scope scope = Scope::Reachable;
  // Upper bound on explorations of the reachable pairs while searching for
  // N/A choices; exceeding it raises StructuralError.
  std::uint64_t max_explorations = 200000;
  // Refuse AllPairs checks whose state product exceeds this.
  std::uint64_t max_pairs = std::uint64_t{1} << 26;
};

struct BranchResult {
  std::string key;
  std::string condition;
  std::string update;
  std::vector<std::string> labels;
  std::string choice;  // "skip", "A<i>", a method name, or empty when no pair exercised it
  std::uint64_t premises = 0;
};

struct ConditionResult {
  std::string label;  // "I", "M1", "N2", "A3"
  ConditionKind kind = ConditionKind::I;
  std::string command;
  Status status = Status::Unknown;
  std::vector<BranchResult> branches;
};

struct Alternative {
  std::string option;
  std::optional<Clause> clause;  // nullopt: this option works at the witness pair
  std::string detail;
};

// Everything needed to re-run the failing step without the original spec.
struct ReplayContext {
  SymbolTable symbols;
  Gts abstract_system;
  Gts concrete_system;
  Coupling relation;
};

struct Counterexample {
  std::string condition;  // label of the failing condition
  std::string command;
  std::string branch;
  std::string option;  // abstract counterpart tried: "skip", "A<i>" or a method name
  Clause clause = Clause::Coupling;
  std::vector<Value> abstract_state;
  std::vector<Value> concrete_state;
  std::string abstract_text;
  std::string concrete_text;
  std::string detail;
  std::vector<Alternative> alternatives;

  std::shared_ptr<const ReplayContext> context;
  std::optional<Command> concrete_command;  // absent for Init
  std::optional<Command> abstract_command;  // absent for Init and stutter
};

struct CheckReport {
  std::string abstract_name;
  std::string concrete_name;
  std::string relation;
  Scope scope = Scope::Reachable;
  MappingMode mode = MappingMode::Search;
  bool passed = false;
  std::vector<ConditionResult> conditions;
  std::optional<Counterexample> counterexample;
  std::uint64_t pairs_explored = 0;
  std::uint64_t explorations = 0;

  const ConditionResult* find(const std::string& label) const;
  nlohmann::json to_json() const;
  std::string to_text() const;
};

// Rule 1. Throws StructuralError when the systems, relation and mapping do
// not fit together (abstract method missing from the concrete class,
// infinite domain, relation arity, dangling mapping entries).
CheckReport check_class_refinement(const Spec& spec, const Gts& abs, const Gts& conc, const Coupling& relation,
                                   const RefinementMapping& mapping = {}, const CheckOptions& options = {});
CheckReport check_class_refinement(const Spec& spec, const std::string& abs, const std::string& conc,
                                   const std::string& relation, const RefinementMapping& mapping = {},
                                   const CheckOptions& options = {});

// Rule 2 on a single pair of commands, over every pair the relation admits.
// `abs_cmd` is read against `abs`'s fields and `conc_cmd` against `conc`'s.
CheckReport check_guarded_assignment(const Spec& spec, const Gts& abs, const Command& abs_cmd, const Gts& conc,
                                     const Command& conc_cmd, const Coupling& relation);
// Whether `conc_cmd` refines skip over every pair the relation admits.
CheckReport check_stutter(const Spec& spec, const Gts& abs, const Gts& conc, const Command& conc_cmd,
                          const Coupling& relation);

struct ReplayResult {
  bool reproduced = false;
  std::optional<Clause> clause;  // what actually fails now, if anything
  std::string detail;
};

// Re-executes the counterexample's step from its witness pair.
ReplayResult replay(const Counterexample& cex);

}  // namespace northpole::refine
