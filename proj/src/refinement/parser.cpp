#include "refinement/parser.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace northpole::refine {

namespace {

enum class Tok {
  Ident,
  Int,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Semi,
  Colon,
  ColonColon,
  Assign,
  Arrow,
  Implies,
  Iff,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  Plus,
  Minus,
  DotDot,
  Dot,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

// Multi-byte spellings accepted alongside the ASCII operators.
struct Alias {
  std::string_view spelling;
  Tok kind;
  std::string_view text;
};

constexpr Alias kUnicode[] = {
    {"∧", Tok::Ident, "and"}, {"∨", Tok::Ident, "or"},  {"¬", Tok::Ident, "not"},
    {"∈", Tok::Ident, "in"},  {"⇒", Tok::Implies, "=>"}, {"⇔", Tok::Iff, "<=>"},
    {"≡", Tok::Iff, "<=>"},   {"≤", Tok::Le, "<="},      {"≥", Tok::Ge, ">="},
    {"≠", Tok::Ne, "!="},     {"→", Tok::Arrow, "->"},
};

constexpr std::pair<std::string_view, Tok> kPunct[] = {
    {"<=>", Tok::Iff}, {"::", Tok::ColonColon}, {":=", Tok::Assign}, {"->", Tok::Arrow}, {"=>", Tok::Implies},
    {"!=", Tok::Ne},   {"/=", Tok::Ne},         {"<=", Tok::Le},     {">=", Tok::Ge},    {"..", Tok::DotDot},
    {"(", Tok::LParen}, {")", Tok::RParen},     {"{", Tok::LBrace},  {"}", Tok::RBrace}, {",", Tok::Comma},
    {";", Tok::Semi},  {":", Tok::Colon},       {"=", Tok::Eq},      {"<", Tok::Lt},     {">", Tok::Gt},
    {"+", Tok::Plus},  {"-", Tok::Minus},       {".", Tok::Dot},
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  std::size_t line_start = 0;
  std::size_t i = 0;
  auto pos_at = [&](std::size_t at) { return SourcePos{line, static_cast<int>(at - line_start) + 1}; };
  while (i < src.size()) {
    char ch = src[i];
    if (ch == '\n') {
      ++line;
      line_start = ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      continue;
    }
    if (ch == '#' || src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    SourcePos pos = pos_at(i);
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\'')) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), pos});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Int, std::string(src.substr(i, j - i)), pos});
      i = j;
      continue;
    }
    bool matched = false;
    for (const auto& a : kUnicode) {
      if (src.substr(i, a.spelling.size()) == a.spelling) {
        out.push_back({a.kind, std::string(a.text), pos});
        i += a.spelling.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    for (const auto& [text, kind] : kPunct) {
      if (src.substr(i, text.size()) == text) {
        out.push_back({kind, std::string(text), pos});
        i += text.size();
        matched = true;
        break;
      }
    }
    if (!matched) throw SpecError(pos, std::string("unexpected character '") + ch + "'");
  }
  out.push_back({Tok::End, "", pos_at(i)});
  return out;
}

const std::set<std::string, std::less<>> kKeywords = {
    "class", "couple", "var", "method", "action", "if", "then", "else", "skip", "emit",
    "true", "false", "and", "or", "not", "in", "boolean", "bool", "int",
};

bool starts_definition(const Token& t) {
  return t.kind == Tok::End ||
         (t.kind == Tok::Ident && (t.text == "class" || t.text == "couple" || t.text == "var" ||
                                   t.text == "method" || t.text == "action"));
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  Command command_only(const Spec& base, const Gts& system) {
    spec_.symbols = base.symbols;
    cls_ = &system;
    Command c;
    c.pos = peek().pos;
    parse_body(c);
    if (!at(Tok::End)) fail("unexpected input after the command");
    return c;
  }

  Spec run() {
    while (!at(Tok::End)) {
      if (at_word("class")) {
        parse_class();
      } else if (at_word("couple")) {
        parse_couple();
      } else {
        fail("expected 'class' or 'couple'");
      }
    }
    return std::move(spec_);
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(i_ + ahead, toks_.size() - 1)]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(std::string_view w) const { return at(Tok::Ident) && peek().text == w; }
  const Token& take() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

  [[noreturn]] void fail(const std::string& message) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SpecError(t.pos, message + ", found " + found);
  }

  const Token& expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    return take();
  }

  void expect_word(std::string_view w) {
    if (!at_word(w)) fail("expected '" + std::string(w) + "'");
    take();
  }

  std::string name(const char* what) {
    if (!at(Tok::Ident) || kKeywords.count(peek().text)) fail(std::string("expected ") + what);
    return take().text;
  }

  Value integer() {
    bool neg = false;
    if (at(Tok::Minus)) {
      take();
      neg = true;
    }
    const Token& t = expect(Tok::Int, "integer");
    try {
      Value v = std::stoll(t.text);
      return neg ? -v : v;
    } catch (const std::out_of_range&) {
      throw SpecError(t.pos, "integer literal out of range");
    }
  }

  // ---- classes ----

  void parse_class() {
    SourcePos pos = take().pos;
    Gts g;
    g.pos = pos;
    g.name = name("class name");
    if (spec_.find_system(g.name)) throw SpecError(pos, "duplicate class '" + g.name + "'");
    if (at(Tok::LParen)) {
      take();
      while (!at(Tok::RParen)) {
        g.params.push_back(name("parameter name"));
        if (at(Tok::Colon)) {
          take();
          name("parameter type");
        }
        if (!at(Tok::Comma)) break;
        take();
      }
      expect(Tok::RParen, "')'");
    }
    cls_ = &g;
    while (at(Tok::Ident) && (at_word("var") || at_word("method") || at_word("action"))) {
      if (at_word("var")) {
        parse_var(g);
      } else if (at_word("method")) {
        SourcePos mpos = take().pos;
        Command m;
        m.pos = mpos;
        m.name = name("method name");
        if (g.method_index(m.name)) throw SpecError(mpos, "duplicate method '" + m.name + "'");
        expect(Tok::LParen, "'('");
        expect(Tok::RParen, "')' (methods take no parameters)");
        parse_body(m);
        g.methods.push_back(std::move(m));
      } else {
        SourcePos apos = take().pos;
        Command a;
        a.pos = apos;
        if (at(Tok::Ident) && peek(1).kind == Tok::ColonColon && !kKeywords.count(peek().text)) {
          a.name = take().text;
        }
        parse_body(a);
        g.actions.push_back(std::move(a));
      }
    }
    cls_ = nullptr;
    if (!starts_definition(peek())) fail("expected 'var', 'method', 'action' or a new definition");
    spec_.systems.push_back(std::move(g));
  }

  void parse_var(Gts& g) {
    take();
    Field f;
    f.pos = peek().pos;
    f.name = name("field name");
    if (g.field_index(f.name)) throw SpecError(f.pos, "duplicate field '" + f.name + "'");
    expect(Tok::Colon, "':'");
    if (at(Tok::LBrace)) {
      take();
      std::vector<int> labels;
      do {
        SourcePos lp = peek().pos;
        int sym = spec_.symbols.intern(name("enumeration label"));
        for (int l : labels) {
          if (l == sym) throw SpecError(lp, "duplicate label '" + spec_.symbols.name(sym) + "'");
        }
        labels.push_back(sym);
      } while (at(Tok::Comma) && (take(), true));
      expect(Tok::RBrace, "'}'");
      f.type = FieldType::enumeration(std::move(labels));
    } else if (at_word("boolean") || at_word("bool")) {
      take();
      f.type = FieldType::boolean();
    } else if (at_word("int")) {
      take();
      f.type = FieldType::unbounded();
    } else if (at(Tok::Int) || at(Tok::Minus)) {
      SourcePos rp = peek().pos;
      Value lo = integer();
      expect(Tok::DotDot, "'..'");
      Value hi = integer();
      if (lo > hi) throw SpecError(rp, "empty range " + std::to_string(lo) + " .. " + std::to_string(hi));
      f.type = FieldType::range(lo, hi);
    } else {
      fail("expected a domain: '{...}', '<lo> .. <hi>', 'boolean' or 'int'");
    }
    expect(Tok::Eq, "'=' and an initial value");
    SourcePos ip = peek().pos;
    f.init = literal_for(f.type, f.name);
    if (!f.type.contains(f.init)) {
      throw SpecError(ip, "initial value " + std::to_string(f.init) + " of '" + f.name + "' is outside its domain");
    }
    g.fields.push_back(std::move(f));
  }

  Value literal_for(const FieldType& t, const std::string& field) {
    SourcePos p = peek().pos;
    switch (t.base) {
      case BaseType::Bool:
        if (at_word("true") || at_word("false")) return take().text == "true" ? 1 : 0;
        fail("expected 'true' or 'false'");
      case BaseType::Int:
        return integer();
      case BaseType::Enum: {
        std::string label = name("enumeration label");
        auto sym = spec_.symbols.find(label);
        if (!sym || !t.contains(*sym)) {
          throw SpecError(p, "label '" + label + "' is not in the domain of '" + field + "'");
        }
        return *sym;
      }
    }
    return 0;
  }

  // A guard is present when "->" appears before the body proper starts.
  bool has_guard() const {
    int depth = 0;
    for (std::size_t k = i_; k < toks_.size(); ++k) {
      const Token& t = toks_[k];
      switch (t.kind) {
        case Tok::LParen:
        case Tok::LBrace:
          ++depth;
          break;
        case Tok::RParen:
        case Tok::RBrace:
          if (--depth < 0) return false;
          break;
        case Tok::Arrow:
          if (depth == 0) return true;
          break;
        case Tok::Assign:
        case Tok::Semi:
        case Tok::End:
          if (depth == 0) return false;
          break;
        case Tok::Ident:
          if (depth == 0 && (starts_definition(t) || t.text == "if" || t.text == "emit" || t.text == "skip")) {
            return false;
          }
          break;
        default:
          break;
      }
    }
    return false;
  }

  void parse_body(Command& c) {
    if (at(Tok::ColonColon)) take();
    if (has_guard()) {
      c.guard = expr();
      require_type(c.guard, BaseType::Bool, "guard");
      expect(Tok::Arrow, "'->'");
    } else {
      c.guard = Expr::bool_lit(true, peek().pos);
    }
    c.body = stmts();
  }

  Block stmts() {
    Block out;
    out.push_back(stmt());
    while (at(Tok::Semi)) {
      take();
      out.push_back(stmt());
    }
    return out;
  }

  Block block() {
    if (at(Tok::LParen)) {
      take();
      Block b = stmts();
      expect(Tok::RParen, "')'");
      return b;
    }
    return Block{stmt()};
  }

  Stmt stmt() {
    Stmt s;
    s.pos = peek().pos;
    if (at_word("skip")) {
      take();
      s.kind = Stmt::Kind::Skip;
      return s;
    }
    if (at_word("emit")) {
      take();
      s.kind = Stmt::Kind::Emit;
      s.label = call_label();
      return s;
    }
    if (at_word("if")) {
      take();
      s.kind = Stmt::Kind::If;
      s.cond = expr();
      require_type(s.cond, BaseType::Bool, "condition");
      expect_word("then");
      s.then_branch = block();
      if (at_word("else")) {
        take();
        s.else_branch = block();
      } else {
        Stmt skip;
        skip.pos = peek().pos;
        s.else_branch.push_back(skip);
      }
      return s;
    }
    if (at(Tok::Ident) && peek(1).kind == Tok::Dot) {
      s.kind = Stmt::Kind::Emit;
      s.label = call_label();
      return s;
    }
    return assignment();
  }

  // "st.back()", "st.back" or "back".
  std::string call_label() {
    std::string label = name("call label");
    while (at(Tok::Dot)) {
      take();
      label += "." + name("call label");
    }
    if (at(Tok::LParen)) {
      take();
      expect(Tok::RParen, "')'");
    }
    return label;
  }

  Stmt assignment() {
    Stmt s;
    s.kind = Stmt::Kind::Assign;
    s.pos = peek().pos;
    std::vector<SourcePos> target_pos;
    do {
      SourcePos p = peek().pos;
      std::string n = name("field name, 'skip', 'emit' or 'if'");
      auto idx = cls_->field_index(n);
      if (!idx) throw SpecError(p, "unknown identifier '" + n + "'");
      for (auto t : s.targets) {
        if (t == *idx) throw SpecError(p, "field '" + n + "' assigned twice");
      }
      s.targets.push_back(*idx);
      s.target_names.push_back(n);
    } while (at(Tok::Comma) && (take(), true));
    expect(Tok::Assign, "':='");
    do {
      s.values.push_back(expr());
    } while (at(Tok::Comma) && (take(), true));
    if (s.values.size() != s.targets.size()) {
      throw SpecError(s.pos, std::to_string(s.targets.size()) + " targets but " + std::to_string(s.values.size()) +
                                 " values");
    }
    for (std::size_t k = 0; k < s.targets.size(); ++k) {
      const Field& f = cls_->fields[s.targets[k]];
      const Expr& v = s.values[k];
      BaseType t = type_check(v, self_typer(), spec_.symbols);
      if (t != f.type.base) throw SpecError(v.pos, "value assigned to '" + f.name + "' has the wrong type");
      bool literal = v.kind == Expr::Kind::Int || v.kind == Expr::Kind::Label || v.kind == Expr::Kind::Bool;
      if (literal && !f.type.contains(v.value)) {
        throw SpecError(v.pos, "literal assigned to '" + f.name + "' is outside its domain");
      }
    }
    return s;
  }

  VarTyper self_typer() const {
    const Gts* g = cls_;
    return [g](Side, std::size_t i) -> const FieldType& { return g->fields[i].type; };
  }

  void require_type(const Expr& e, BaseType want, const char* what) {
    if (type_check(e, self_typer(), spec_.symbols) != want) {
      throw SpecError(e.pos, std::string(what) + " must be boolean");
    }
  }

  // ---- couplings ----

  void parse_couple() {
    SourcePos pos = take().pos;
    Coupling r;
    r.pos = pos;
    r.name = name("relation name");
    if (spec_.find_relation(r.name)) throw SpecError(pos, "duplicate relation '" + r.name + "'");
    r.abs_params = param_list();
    r.conc_params = param_list();
    std::set<std::string> seen;
    for (const auto* list : {&r.abs_params, &r.conc_params}) {
      for (const auto& p : *list) {
        if (!seen.insert(p).second) throw SpecError(pos, "parameter '" + p + "' named twice");
      }
    }
    expect(Tok::ColonColon, "'::'");
    couple_ = &r;
    r.expr = expr();
    couple_ = nullptr;
    if (!starts_definition(peek())) fail("malformed relation expression: expected an operator");
    spec_.relations.push_back(std::move(r));
  }

  std::vector<std::string> param_list() {
    std::vector<std::string> out;
    expect(Tok::LParen, "'('");
    while (!at(Tok::RParen)) {
      out.push_back(name("field name"));
      if (!at(Tok::Comma)) break;
      take();
    }
    expect(Tok::RParen, "')'");
    return out;
  }

  // ---- expressions, loosest binding first ----

  Expr expr() {
    Expr lhs = implication();
    while (at(Tok::Iff)) {
      SourcePos p = take().pos;
      lhs = Expr::binary(Op::Iff, std::move(lhs), implication(), p);
    }
    return lhs;
  }

  Expr implication() {
    Expr lhs = disjunction();
    if (at(Tok::Implies)) {
      SourcePos p = take().pos;
      return Expr::binary(Op::Implies, std::move(lhs), implication(), p);
    }
    return lhs;
  }

  Expr disjunction() {
    Expr lhs = conjunction();
    while (at_word("or")) {
      SourcePos p = take().pos;
      lhs = Expr::binary(Op::Or, std::move(lhs), conjunction(), p);
    }
    return lhs;
  }

  Expr conjunction() {
    Expr lhs = negation();
    while (at_word("and")) {
      SourcePos p = take().pos;
      lhs = Expr::binary(Op::And, std::move(lhs), negation(), p);
    }
    return lhs;
  }

  Expr negation() {
    if (at_word("not")) {
      SourcePos p = take().pos;
      return Expr::unary(Op::Not, negation(), p);
    }
    return comparison();
  }

  static std::optional<Op> comparison_op(Tok k) {
    switch (k) {
      case Tok::Eq: return Op::Eq;
      case Tok::Ne: return Op::Ne;
      case Tok::Lt: return Op::Lt;
      case Tok::Le: return Op::Le;
      case Tok::Gt: return Op::Gt;
      case Tok::Ge: return Op::Ge;
      default: return std::nullopt;
    }
  }

  // Chains such as "1 <= c <= 9" become conjunctions of adjacent pairs.
  Expr comparison() {
    Expr lhs = additive();
    if (at_word("in")) {
      SourcePos p = take().pos;
      expect(Tok::LBrace, "'{'");
      std::vector<Expr> members;
      if (!at(Tok::RBrace)) {
        do {
          members.push_back(additive());
        } while (at(Tok::Comma) && (take(), true));
      }
      expect(Tok::RBrace, "'}'");
      return Expr::member_of(std::move(lhs), std::move(members), p);
    }
    std::optional<Expr> chain;
    Expr left = lhs;
    while (auto op = comparison_op(peek().kind)) {
      SourcePos p = take().pos;
      Expr right = additive();
      Expr cmp = Expr::binary(*op, left, right, p);
      chain = chain ? Expr::binary(Op::And, std::move(*chain), std::move(cmp), p) : std::move(cmp);
      left = std::move(right);
    }
    return chain ? std::move(*chain) : lhs;
  }

  Expr additive() {
    Expr lhs = unary_minus();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      const Token& t = take();
      lhs = Expr::binary(t.kind == Tok::Plus ? Op::Add : Op::Sub, std::move(lhs), unary_minus(), t.pos);
    }
    return lhs;
  }

  Expr unary_minus() {
    if (at(Tok::Minus)) {
      SourcePos p = take().pos;
      if (at(Tok::Int)) return Expr::int_lit(-integer_token(), p);
      return Expr::unary(Op::Neg, unary_minus(), p);
    }
    return primary();
  }

  Value integer_token() {
    const Token& t = take();
    try {
      return std::stoll(t.text);
    } catch (const std::out_of_range&) {
      throw SpecError(t.pos, "integer literal out of range");
    }
  }

  Expr primary() {
    SourcePos p = peek().pos;
    if (at(Tok::Int)) return Expr::int_lit(integer_token(), p);
    if (at(Tok::LParen)) {
      take();
      Expr e = expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (at_word("true") || at_word("false")) return Expr::bool_lit(take().text == "true", p);
    if (!at(Tok::Ident) || kKeywords.count(peek().text)) fail("malformed expression: expected an operand");
    std::string n = take().text;
    return resolve(n, p);
  }

  Expr resolve(const std::string& n, SourcePos p) {
    if (cls_) {
      if (auto idx = cls_->field_index(n)) return Expr::variable(Side::Self, *idx, n, p);
    }
    if (couple_) {
      for (std::size_t k = 0; k < couple_->abs_params.size(); ++k) {
        if (couple_->abs_params[k] == n) return Expr::variable(Side::Abstract, k, n, p);
      }
      for (std::size_t k = 0; k < couple_->conc_params.size(); ++k) {
        if (couple_->conc_params[k] == n) return Expr::variable(Side::Concrete, k, n, p);
      }
    }
    if (auto sym = spec_.symbols.find(n)) return Expr::label(*sym, p);
    throw SpecError(p, "unknown identifier '" + n + "'");
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  Spec spec_;
  const Gts* cls_ = nullptr;
  const Coupling* couple_ = nullptr;
};

}  // namespace

Spec parse_spec(std::string_view text) { return Parser(text).run(); }

Command parse_command(const Spec& spec, const Gts& system, std::string_view text) {
  return Parser(text).command_only(spec, system);
}

Spec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open spec file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

void bind_coupling(const Spec& spec, const Coupling& relation, const Gts& abs, const Gts& conc) {
  if (relation.abs_params.size() != abs.fields.size()) {
    throw StructuralError("relation " + relation.name + " names " + std::to_string(relation.abs_params.size()) +
                          " abstract fields but " + abs.name + " has " + std::to_string(abs.fields.size()));
  }
  if (relation.conc_params.size() != conc.fields.size()) {
    throw StructuralError("relation " + relation.name + " names " + std::to_string(relation.conc_params.size()) +
                          " concrete fields but " + conc.name + " has " + std::to_string(conc.fields.size()));
  }
  VarTyper typer = [&](Side side, std::size_t i) -> const FieldType& {
    return side == Side::Abstract ? abs.fields[i].type : conc.fields[i].type;
  };
  try {
    if (type_check(relation.expr, typer, spec.symbols) != BaseType::Bool) {
      throw StructuralError("relation " + relation.name + " is not a boolean predicate");
    }
  } catch (const SpecError& e) {
    throw StructuralError("relation " + relation.name + " at " + e.what());
  }
}

}  // namespace northpole::refine
