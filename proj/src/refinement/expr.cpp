#include <algorithm>

#include "refinement/ast.hpp"

namespace northpole::refine {

namespace {

std::string located(SourcePos pos, const std::string& message) {
  return std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message;
}

[[noreturn]] void type_error(const Expr& e, const std::string& message) { throw SpecError(e.pos, message); }

}  // namespace

SpecError::SpecError(SourcePos pos, const std::string& message)
    : std::runtime_error(located(pos, message)), pos_(pos), message_(message) {}

int SymbolTable::intern(const std::string& name) {
  auto [it, inserted] = ids_.try_emplace(name, static_cast<int>(names_.size()));
  if (inserted) names_.push_back(name);
  return it->second;
}

std::optional<int> SymbolTable::find(const std::string& name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

FieldType FieldType::enumeration(std::vector<int> labels) {
  FieldType t;
  t.base = BaseType::Enum;
  t.labels = std::move(labels);
  return t;
}

FieldType FieldType::range(Value lo, Value hi) {
  FieldType t;
  t.base = BaseType::Int;
  t.lo = lo;
  t.hi = hi;
  return t;
}

FieldType FieldType::boolean() {
  FieldType t;
  t.base = BaseType::Bool;
  t.lo = 0;
  t.hi = 1;
  return t;
}

FieldType FieldType::unbounded() {
  FieldType t;
  t.bounded = false;
  return t;
}

bool FieldType::contains(Value v) const {
  switch (base) {
    case BaseType::Enum:
      return std::find(labels.begin(), labels.end(), v) != labels.end();
    case BaseType::Bool:
      return v == 0 || v == 1;
    case BaseType::Int:
      return !bounded || (v >= lo && v <= hi);
  }
  return false;
}

std::size_t FieldType::size() const {
  switch (base) {
    case BaseType::Enum:
      return labels.size();
    case BaseType::Bool:
      return 2;
    case BaseType::Int:
      if (!bounded) throw StructuralError("size() of an unbounded integer domain");
      return static_cast<std::size_t>(hi - lo + 1);
  }
  return 0;
}

Value FieldType::at(std::size_t i) const {
  if (base == BaseType::Enum) return labels.at(i);
  return lo + static_cast<Value>(i);
}

std::size_t FieldType::index_of(Value v) const {
  if (base == BaseType::Enum) {
    return static_cast<std::size_t>(std::find(labels.begin(), labels.end(), v) - labels.begin());
  }
  return static_cast<std::size_t>(v - lo);
}

const char* op_text(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Eq: return "=";
    case Op::Ne: return "!=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Implies: return "=>";
    case Op::Iff: return "<=>";
    case Op::Not: return "not";
    case Op::Neg: return "-";
  }
  return "?";
}

Expr Expr::int_lit(Value v, SourcePos pos) {
  Expr e;
  e.kind = Kind::Int;
  e.value = v;
  e.pos = pos;
  return e;
}

Expr Expr::bool_lit(bool v, SourcePos pos) {
  Expr e;
  e.kind = Kind::Bool;
  e.value = v ? 1 : 0;
  e.pos = pos;
  return e;
}

Expr Expr::label(int symbol, SourcePos pos) {
  Expr e;
  e.kind = Kind::Label;
  e.value = symbol;
  e.pos = pos;
  return e;
}

Expr Expr::variable(Side side, std::size_t index, std::string name, SourcePos pos) {
  Expr e;
  e.kind = Kind::Var;
  e.side = side;
  e.var = index;
  e.name = std::move(name);
  e.pos = pos;
  return e;
}

Expr Expr::unary(Op op, Expr operand, SourcePos pos) {
  Expr e;
  e.kind = Kind::Unary;
  e.op = op;
  e.args.push_back(std::move(operand));
  e.pos = pos;
  return e;
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs, SourcePos pos) {
  Expr e;
  e.kind = Kind::Binary;
  e.op = op;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  e.pos = pos;
  return e;
}

Expr Expr::member_of(Expr subject, std::vector<Expr> set, SourcePos pos) {
  Expr e;
  e.kind = Kind::In;
  e.pos = pos;
  e.args.push_back(std::move(subject));
  for (auto& m : set) e.args.push_back(std::move(m));
  return e;
}

bool Expr::operator==(const Expr& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::Int:
    case Kind::Bool:
    case Kind::Label:
      return value == o.value;
    case Kind::Var:
      return side == o.side && var == o.var && name == o.name;
    case Kind::Unary:
    case Kind::Binary:
      return op == o.op && args == o.args;
    case Kind::In:
      return args == o.args;
  }
  return false;
}

bool Stmt::operator==(const Stmt& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::Assign:
      return targets == o.targets && target_names == o.target_names && values == o.values;
    case Kind::If:
      return cond == o.cond && then_branch == o.then_branch && else_branch == o.else_branch;
    case Kind::Emit:
      return label == o.label;
    case Kind::Skip:
      return true;
  }
  return false;
}

bool Command::operator==(const Command& o) const { return name == o.name && guard == o.guard && body == o.body; }

bool Field::operator==(const Field& o) const { return name == o.name && type == o.type && init == o.init; }

bool Gts::operator==(const Gts& o) const {
  return name == o.name && params == o.params && fields == o.fields && methods == o.methods && actions == o.actions;
}

bool Coupling::operator==(const Coupling& o) const {
  return name == o.name && abs_params == o.abs_params && conc_params == o.conc_params && expr == o.expr;
}

bool Spec::operator==(const Spec& o) const {
  return symbols.names() == o.symbols.names() && systems == o.systems && relations == o.relations;
}

std::optional<std::size_t> Gts::field_index(const std::string& n) const {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].name == n) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Gts::method_index(const std::string& n) const {
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (methods[i].name == n) return i;
  }
  return std::nullopt;
}

std::vector<Value> Gts::initial() const {
  std::vector<Value> out;
  out.reserve(fields.size());
  for (const auto& f : fields) out.push_back(f.init);
  return out;
}

const Gts* Spec::find_system(const std::string& n) const {
  for (const auto& s : systems) {
    if (s.name == n) return &s;
  }
  return nullptr;
}

const Coupling* Spec::find_relation(const std::string& n) const {
  for (const auto& r : relations) {
    if (r.name == n) return &r;
  }
  return nullptr;
}

Value eval(const Expr& e, const Env& env) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Int:
    case K::Bool:
    case K::Label:
      return e.value;
    case K::Var:
      switch (e.side) {
        case Side::Self: return env.self[e.var];
        case Side::Abstract: return env.abs[e.var];
        case Side::Concrete: return env.conc[e.var];
      }
      return 0;
    case K::Unary: {
      Value v = eval(e.args[0], env);
      return e.op == Op::Not ? (v == 0 ? 1 : 0) : -v;
    }
    case K::In: {
      Value v = eval(e.args[0], env);
      for (std::size_t i = 1; i < e.args.size(); ++i) {
        if (eval(e.args[i], env) == v) return 1;
      }
      return 0;
    }
    case K::Binary:
      break;
  }
  // Short-circuit the connectives before evaluating the right operand.
  Value a = eval(e.args[0], env);
  switch (e.op) {
    case Op::And: return a != 0 && eval(e.args[1], env) != 0;
    case Op::Or: return a != 0 || eval(e.args[1], env) != 0;
    case Op::Implies: return a == 0 || eval(e.args[1], env) != 0;
    default: break;
  }
  Value b = eval(e.args[1], env);
  switch (e.op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Eq: return a == b;
    case Op::Ne: return a != b;
    case Op::Lt: return a < b;
    case Op::Le: return a <= b;
    case Op::Gt: return a > b;
    case Op::Ge: return a >= b;
    case Op::Iff: return (a != 0) == (b != 0);
    default: return 0;
  }
}

namespace {

const char* type_name(BaseType t) {
  switch (t) {
    case BaseType::Int: return "integer";
    case BaseType::Bool: return "boolean";
    case BaseType::Enum: return "enumeration";
  }
  return "?";
}

// A label compared against an enumeration variable must be one of its labels.
void check_label_fits(const Expr& var, const Expr& label, const VarTyper& types, const SymbolTable& symbols) {
  if (var.kind != Expr::Kind::Var || label.kind != Expr::Kind::Label) return;
  const FieldType& t = types(var.side, var.var);
  if (t.base == BaseType::Enum && !t.contains(label.value)) {
    throw SpecError(label.pos, "label '" + symbols.name(static_cast<int>(label.value)) + "' is not in the domain of '" +
                                   var.name + "'");
  }
}

void expect(const Expr& e, BaseType got, BaseType want) {
  if (got != want) {
    type_error(e, std::string("expected ") + type_name(want) + " operand, found " + type_name(got));
  }
}

}  // namespace

BaseType type_check(const Expr& e, const VarTyper& types, const SymbolTable& symbols) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Int: return BaseType::Int;
    case K::Bool: return BaseType::Bool;
    case K::Label: return BaseType::Enum;
    case K::Var: return types(e.side, e.var).base;
    case K::Unary: {
      BaseType t = type_check(e.args[0], types, symbols);
      BaseType want = e.op == Op::Not ? BaseType::Bool : BaseType::Int;
      expect(e.args[0], t, want);
      return want;
    }
    case K::In: {
      BaseType t = type_check(e.args[0], types, symbols);
      for (std::size_t i = 1; i < e.args.size(); ++i) {
        expect(e.args[i], type_check(e.args[i], types, symbols), t);
        check_label_fits(e.args[0], e.args[i], types, symbols);
      }
      return BaseType::Bool;
    }
    case K::Binary:
      break;
  }
  BaseType a = type_check(e.args[0], types, symbols);
  BaseType b = type_check(e.args[1], types, symbols);
  switch (e.op) {
    case Op::Add:
    case Op::Sub:
      expect(e.args[0], a, BaseType::Int);
      expect(e.args[1], b, BaseType::Int);
      return BaseType::Int;
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
      expect(e.args[0], a, BaseType::Int);
      expect(e.args[1], b, BaseType::Int);
      return BaseType::Bool;
    case Op::Eq:
    case Op::Ne:
      expect(e.args[1], b, a);
      check_label_fits(e.args[0], e.args[1], types, symbols);
      check_label_fits(e.args[1], e.args[0], types, symbols);
      return BaseType::Bool;
    default:
      expect(e.args[0], a, BaseType::Bool);
      expect(e.args[1], b, BaseType::Bool);
      return BaseType::Bool;
  }
}

}  // namespace northpole::refine
