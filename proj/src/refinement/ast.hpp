#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace northpole::refine {

using Value = std::int64_t;

struct SourcePos {
  int line = 0;
  int column = 0;
};

// Error tied to a place in spec text (parse, type and domain errors).
class SpecError : public std::runtime_error {
 public:
  SpecError(SourcePos pos, const std::string& message);
  SourcePos pos() const { return pos_; }
  const std::string& message() const { return message_; }

 private:
  SourcePos pos_;
  std::string message_;
};

// Problems found when systems and relations are put together for a check:
// unknown names, arity or type mismatches, infinite domains.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Enumeration labels are interned so that the same label compares equal
// across classes.
class SymbolTable {
 public:
  int intern(const std::string& name);
  std::optional<int> find(const std::string& name) const;
  const std::string& name(int id) const { return names_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> ids_;
};

enum class BaseType { Int, Bool, Enum };

struct FieldType {
  BaseType base = BaseType::Int;
  std::vector<int> labels;  // Enum: symbol ids in declaration order
  Value lo = 0;
  Value hi = 0;
  bool bounded = true;  // Int without bounds is only rejected when checked

  static FieldType enumeration(std::vector<int> labels);
  static FieldType range(Value lo, Value hi);
  static FieldType boolean();
  static FieldType unbounded();

  bool finite() const { return base != BaseType::Int || bounded; }
  bool contains(Value v) const;
  std::size_t size() const;
  Value at(std::size_t i) const;
  std::size_t index_of(Value v) const;

  bool operator==(const FieldType&) const = default;
};

enum class Op { Add, Sub, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Implies, Iff, Not, Neg };

const char* op_text(Op op);

// Which valuation a variable reads: the class's own fields, or the abstract
// or concrete side of a coupling relation.
enum class Side { Self, Abstract, Concrete };

struct Expr {
  enum class Kind { Int, Bool, Label, Var, Unary, Binary, In };

  Kind kind = Kind::Bool;
  Value value = 1;  // Int/Bool literal, or Label symbol id
  Side side = Side::Self;
  std::size_t var = 0;
  std::string name;  // variable name, kept for printing
  Op op = Op::And;
  std::vector<Expr> args;  // operands; for In: subject then set members
  SourcePos pos;

  static Expr int_lit(Value v, SourcePos pos = {});
  static Expr bool_lit(bool v, SourcePos pos = {});
  static Expr label(int symbol, SourcePos pos = {});
  static Expr variable(Side side, std::size_t index, std::string name, SourcePos pos = {});
  static Expr unary(Op op, Expr operand, SourcePos pos = {});
  static Expr binary(Op op, Expr lhs, Expr rhs, SourcePos pos = {});
  static Expr member_of(Expr subject, std::vector<Expr> set, SourcePos pos = {});

  // Structural equality; source positions are ignored.
  bool operator==(const Expr& other) const;
};

struct Stmt {
  enum class Kind { Assign, If, Emit, Skip };

  Kind kind = Kind::Skip;
  std::vector<std::size_t> targets;  // Assign: field indices, assigned in parallel
  std::vector<std::string> target_names;
  std::vector<Expr> values;
  Expr cond;  // If
  std::vector<Stmt> then_branch;
  std::vector<Stmt> else_branch;
  std::string label;  // Emit: an outgoing call such as "st.back"
  SourcePos pos;

  bool operator==(const Stmt& other) const;
};

using Block = std::vector<Stmt>;

// A guarded body: a method, an action, or the normalized form of either.
struct Command {
  std::string name;  // empty for unnamed actions
  Expr guard;        // literal true when the source omits it
  Block body;
  SourcePos pos;

  bool operator==(const Command& other) const;
};

struct Field {
  std::string name;
  FieldType type;
  Value init = 0;
  SourcePos pos;

  bool operator==(const Field& other) const;
};

struct Gts {
  std::string name;
  std::vector<std::string> params;  // constructor parameters, informational
  std::vector<Field> fields;
  std::vector<Command> methods;
  std::vector<Command> actions;
  SourcePos pos;

  std::optional<std::size_t> field_index(const std::string& name) const;
  std::optional<std::size_t> method_index(const std::string& name) const;
  std::vector<Value> initial() const;

  bool operator==(const Gts& other) const;
};

struct Coupling {
  std::string name;
  std::vector<std::string> abs_params;
  std::vector<std::string> conc_params;
  Expr expr;
  SourcePos pos;

  bool operator==(const Coupling& other) const;
};

struct Spec {
  SymbolTable symbols;
  std::vector<Gts> systems;
  std::vector<Coupling> relations;

  const Gts* find_system(const std::string& name) const;
  const Coupling* find_relation(const std::string& name) const;

  bool operator==(const Spec& other) const;
};

// Read-only views of the valuations an expression can see.
struct Env {
  std::span<const Value> self;
  std::span<const Value> abs;
  std::span<const Value> conc;
};

Value eval(const Expr& e, const Env& env);
inline bool holds(const Expr& e, const Env& env) { return eval(e, env) != 0; }

// Types variables of `side` by `fields` and checks operand types and that
// labels compared with or assigned to an enumeration belong to it.
// `types_of(side, index)` supplies variable types. Throws SpecError.
using VarTyper = std::function<const FieldType&(Side, std::size_t)>;
BaseType type_check(const Expr& e, const VarTyper& types, const SymbolTable& symbols);

}  // namespace northpole::refine
