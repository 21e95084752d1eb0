#include "refinement/printer.hpp"

namespace northpole::refine {

std::string print_expr(const Expr& e, const SymbolTable& symbols) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Int:
      return std::to_string(e.value);
    case K::Bool:
      return e.value ? "true" : "false";
    case K::Label:
      return symbols.name(static_cast<int>(e.value));
    case K::Var:
      return e.name;
    case K::Unary:
      if (e.op == Op::Not) return "(not " + print_expr(e.args[0], symbols) + ")";
      return "(-(" + print_expr(e.args[0], symbols) + "))";
    case K::Binary:
      return "(" + print_expr(e.args[0], symbols) + " " + op_text(e.op) + " " + print_expr(e.args[1], symbols) + ")";
    case K::In: {
      std::string out = "(" + print_expr(e.args[0], symbols) + " in {";
      for (std::size_t i = 1; i < e.args.size(); ++i) {
        if (i > 1) out += ", ";
        out += print_expr(e.args[i], symbols);
      }
      return out + "})";
    }
  }
  return "?";
}

namespace {

std::string print_stmt(const Stmt& s, const SymbolTable& symbols) {
  switch (s.kind) {
    case Stmt::Kind::Skip:
      return "skip";
    case Stmt::Kind::Emit:
      return "emit " + s.label;
    case Stmt::Kind::If:
      return "if " + print_expr(s.cond, symbols) + " then (" + print_block(s.then_branch, symbols) + ") else (" +
             print_block(s.else_branch, symbols) + ")";
    case Stmt::Kind::Assign: {
      std::string lhs;
      std::string rhs;
      for (std::size_t i = 0; i < s.targets.size(); ++i) {
        if (i) {
          lhs += ", ";
          rhs += ", ";
        }
        lhs += s.target_names[i];
        rhs += print_expr(s.values[i], symbols);
      }
      return lhs + " := " + rhs;
    }
  }
  return "?";
}

}  // namespace

std::string print_block(const Block& b, const SymbolTable& symbols) {
  std::string out;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i) out += " ; ";
    out += print_stmt(b[i], symbols);
  }
  return out;
}

std::string print_command(const Command& c, const SymbolTable& symbols) {
  return print_expr(c.guard, symbols) + " -> " + print_block(c.body, symbols);
}

std::string print_type(const FieldType& t, const SymbolTable& symbols) {
  switch (t.base) {
    case BaseType::Bool:
      return "boolean";
    case BaseType::Int:
      if (!t.bounded) return "int";
      return std::to_string(t.lo) + " .. " + std::to_string(t.hi);
    case BaseType::Enum: {
      std::string out = "{";
      for (std::size_t i = 0; i < t.labels.size(); ++i) {
        if (i) out += ", ";
        out += symbols.name(t.labels[i]);
      }
      return out + "}";
    }
  }
  return "?";
}

std::string format_value(const FieldType& t, Value v, const SymbolTable& symbols) {
  switch (t.base) {
    case BaseType::Bool:
      return v ? "true" : "false";
    case BaseType::Enum:
      if (v >= 0 && static_cast<std::size_t>(v) < symbols.size()) return symbols.name(static_cast<int>(v));
      return "<label " + std::to_string(v) + ">";
    case BaseType::Int:
      return std::to_string(v);
  }
  return "?";
}

std::string print_system(const Gts& g, const SymbolTable& symbols) {
  std::string out = "class " + g.name;
  if (!g.params.empty()) {
    out += "(";
    for (std::size_t i = 0; i < g.params.size(); ++i) {
      if (i) out += ", ";
      out += g.params[i];
    }
    out += ")";
  }
  out += "\n";
  for (const auto& f : g.fields) {
    out += "  var " + f.name + " : " + print_type(f.type, symbols) + " = " + format_value(f.type, f.init, symbols) +
           "\n";
  }
  for (const auto& m : g.methods) out += "  method " + m.name + "() :: " + print_command(m, symbols) + "\n";
  for (const auto& a : g.actions) {
    out += "  action ";
    if (!a.name.empty()) out += a.name + " ";
    out += ":: " + print_command(a, symbols) + "\n";
  }
  return out;
}

std::string print_coupling(const Coupling& r, const SymbolTable& symbols) {
  auto list = [](const std::vector<std::string>& xs) {
    std::string s = "(";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) s += ", ";
      s += xs[i];
    }
    return s + ")";
  };
  return "couple " + r.name + " " + list(r.abs_params) + " " + list(r.conc_params) +
         " :: " + print_expr(r.expr, symbols) + "\n";
}

std::string print_spec(const Spec& spec) {
  std::string out;
  for (const auto& g : spec.systems) out += print_system(g, spec.symbols) + "\n";
  for (const auto& r : spec.relations) out += print_coupling(r, spec.symbols);
  return out;
}

}  // namespace northpole::refine
