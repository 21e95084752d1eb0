#include "refinement/gts.hpp"

#include "refinement/printer.hpp"

namespace northpole::refine {

StateSpace::StateSpace(const Gts& system) {
  for (const auto& f : system.fields) {
    if (!f.type.finite()) {
      throw StructuralError(system.name + "." + f.name + " has an infinite domain; only finite systems can be checked");
    }
    types_.push_back(f.type);
    std::uint64_t n = f.type.size();
    if (size_ > kMaxStates / n) {
      throw StructuralError(system.name + " has more than " + std::to_string(kMaxStates) + " states");
    }
    size_ *= n;
  }
}

void StateSpace::decode(std::uint64_t index, std::vector<Value>& out) const {
  out.resize(types_.size());
  for (std::size_t i = types_.size(); i-- > 0;) {
    std::uint64_t n = types_[i].size();
    out[i] = types_[i].at(static_cast<std::size_t>(index % n));
    index /= n;
  }
}

std::vector<Value> StateSpace::state(std::uint64_t index) const {
  std::vector<Value> out;
  decode(index, out);
  return out;
}

std::optional<std::uint64_t> StateSpace::index(std::span<const Value> state) const {
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < types_.size(); ++i) {
    if (!types_[i].contains(state[i])) return std::nullopt;
    idx = idx * types_[i].size() + types_[i].index_of(state[i]);
  }
  return idx;
}

bool enabled(const Command& c, std::span<const Value> pre) { return holds(c.guard, Env{pre, {}, {}}); }

namespace {

bool run_block(const Gts& g, const Block& b, Execution& ex) {
  for (const auto& s : b) {
    switch (s.kind) {
      case Stmt::Kind::Skip:
        break;
      case Stmt::Kind::Emit:
        ex.labels.push_back(s.label);
        break;
      case Stmt::Kind::If: {
        bool taken = holds(s.cond, Env{ex.state, {}, {}});
        ex.branch += taken ? 'T' : 'F';
        if (!run_block(g, taken ? s.then_branch : s.else_branch, ex)) return false;
        break;
      }
      case Stmt::Kind::Assign: {
        std::vector<Value> vals;
        vals.reserve(s.values.size());
        for (const auto& v : s.values) vals.push_back(eval(v, Env{ex.state, {}, {}}));
        for (std::size_t i = 0; i < vals.size(); ++i) {
          std::size_t f = s.targets[i];
          if (!g.fields[f].type.contains(vals[i])) {
            ex.domain_error = DomainError{f, vals[i]};
            return false;
          }
          ex.state[f] = vals[i];
        }
        break;
      }
    }
  }
  return true;
}

Expr substitute(const Expr& e, const std::vector<std::optional<Expr>>& vals) {
  if (e.kind == Expr::Kind::Var && e.side == Side::Self && vals[e.var]) return *vals[e.var];
  Expr out = e;
  for (auto& a : out.args) a = substitute(a, vals);
  return out;
}

struct Path {
  std::vector<std::optional<Expr>> vals;
  std::vector<std::string> conds;
  std::vector<std::string> labels;
  std::string key;
};

using Cursor = std::vector<std::pair<const Block*, std::size_t>>;

void walk(const Gts& g, const SymbolTable& symbols, Cursor cur, Path p, std::vector<BranchInfo>& out) {
  while (!cur.empty()) {
    auto& [block, next] = cur.back();
    if (next == block->size()) {
      cur.pop_back();
      continue;
    }
    const Stmt& s = (*block)[next++];
    switch (s.kind) {
      case Stmt::Kind::Skip:
        break;
      case Stmt::Kind::Emit:
        p.labels.push_back(s.label);
        break;
      case Stmt::Kind::Assign: {
        std::vector<Expr> vals;
        for (const auto& v : s.values) vals.push_back(substitute(v, p.vals));
        for (std::size_t i = 0; i < vals.size(); ++i) p.vals[s.targets[i]] = std::move(vals[i]);
        break;
      }
      case Stmt::Kind::If: {
        std::string cond = print_expr(substitute(s.cond, p.vals), symbols);
        for (bool taken : {true, false}) {
          Cursor c2 = cur;
          c2.emplace_back(taken ? &s.then_branch : &s.else_branch, 0);
          Path p2 = p;
          p2.conds.push_back(taken ? cond : "(not " + cond + ")");
          p2.key += taken ? 'T' : 'F';
          walk(g, symbols, std::move(c2), std::move(p2), out);
        }
        return;
      }
    }
  }
  BranchInfo info;
  info.key = p.key;
  info.labels = p.labels;
  for (std::size_t i = 0; i < p.conds.size(); ++i) info.condition += (i ? " and " : "") + p.conds[i];
  if (info.condition.empty()) info.condition = "true";
  std::string lhs;
  std::string rhs;
  for (std::size_t f = 0; f < p.vals.size(); ++f) {
    if (!p.vals[f]) continue;
    if (!lhs.empty()) {
      lhs += ", ";
      rhs += ", ";
    }
    lhs += g.fields[f].name;
    rhs += print_expr(*p.vals[f], symbols);
  }
  info.update = lhs.empty() ? "skip" : lhs + " := " + rhs;
  out.push_back(std::move(info));
}

}  // namespace

Execution execute(const Gts& system, const Command& c, std::span<const Value> pre) {
  Execution ex;
  ex.state.assign(pre.begin(), pre.end());
  if (!run_block(system, c.body, ex)) ex.branch += '!';
  return ex;
}

std::vector<BranchInfo> branches(const Gts& system, const Command& c, const SymbolTable& symbols) {
  std::vector<BranchInfo> out;
  Path p;
  p.vals.resize(system.fields.size());
  walk(system, symbols, Cursor{{&c.body, 0}}, std::move(p), out);
  return out;
}

std::string format_state(const Gts& system, std::span<const Value> state, const SymbolTable& symbols) {
  std::string out = "{";
  for (std::size_t i = 0; i < system.fields.size() && i < state.size(); ++i) {
    if (i) out += ", ";
    out += system.fields[i].name + "=" + format_value(system.fields[i].type, state[i], symbols);
  }
  return out + "}";
}

}  // namespace northpole::refine
