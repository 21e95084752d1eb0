#include "refinement/checker.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "refinement/gts.hpp"
#include "refinement/parser.hpp"
#include "refinement/printer.hpp"

namespace northpole::refine {

const char* to_string(Scope s) { return s == Scope::AllPairs ? "all-pairs" : "reachable"; }

const char* to_string(ConditionKind k) {
  switch (k) {
    case ConditionKind::I: return "I";
    case ConditionKind::M: return "M";
    case ConditionKind::N: return "N";
    case ConditionKind::A: return "A";
  }
  return "?";
}

const char* to_string(Clause c) {
  switch (c) {
    case Clause::Init: return "init";
    case Clause::Domain: return "domain";
    case Clause::Guard: return "guard";
    case Clause::Labels: return "labels";
    case Clause::Coupling: return "coupling";
  }
  return "?";
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Unknown: return "unknown";
  }
  return "?";
}

const char* to_string(MappingMode m) { return m == MappingMode::Search ? "search" : "explicit"; }

Scope parse_scope(const std::string& s) {
  if (s == "all-pairs" || s == "allpairs" || s == "all") return Scope::AllPairs;
  if (s == "reachable") return Scope::Reachable;
  throw std::invalid_argument("unknown scope '" + s + "' (expected reachable or all-pairs)");
}

const ConditionResult* CheckReport::find(const std::string& label) const {
  for (const auto& c : conditions) {
    if (c.label == label) return &c;
  }
  return nullptr;
}

namespace {

struct Option {
  const Command* cmd = nullptr;  // nullptr: stutter
  std::string text;
};

struct Failure {
  Clause clause = Clause::Coupling;
  std::string detail;
};

struct Systems {
  const SymbolTable& sym;
  const Gts& abs;
  const Gts& conc;
  const Coupling& rel;

  bool related(std::span<const Value> x, std::span<const Value> y) const { return holds(rel.expr, Env{{}, x, y}); }
  std::string abs_text(std::span<const Value> x) const { return format_state(abs, x, sym); }
  std::string conc_text(std::span<const Value> y) const { return format_state(conc, y, sym); }
};

std::string label_list(const std::vector<std::string>& labels) {
  std::string out = "[";
  for (std::size_t i = 0; i < labels.size(); ++i) out += (i ? ", " : "") + labels[i];
  return out + "]";
}

std::string domain_text(const Systems& s, const Gts& g, const DomainError& e) {
  const Field& f = g.fields[e.field];
  return g.name + "." + f.name + " := " + std::to_string(e.value) + " leaves " + print_type(f.type, s.sym);
}

// Rule 2 for one concrete step from (x, y), with the matching abstract
// command or skip. On success `x_next` holds the abstract post-state.
std::optional<Failure> step(const Systems& s, std::span<const Value> x, const Execution& ce, const Option& opt,
                            std::vector<Value>& x_next) {
  if (ce.domain_error) return Failure{Clause::Domain, domain_text(s, s.conc, *ce.domain_error)};
  if (!opt.cmd) {
    if (!ce.labels.empty()) {
      return Failure{Clause::Labels, "a stutter may not call out, but the concrete step emits " + label_list(ce.labels)};
    }
    if (!s.related(x, ce.state)) {
      return Failure{Clause::Coupling, s.rel.name + " fails between " + s.abs_text(x) + " and the concrete result " +
                                           s.conc_text(ce.state)};
    }
    x_next.assign(x.begin(), x.end());
    return std::nullopt;
  }
  if (!enabled(*opt.cmd, x)) {
    return Failure{Clause::Guard,
                   "guard of " + opt.text + " " + print_expr(opt.cmd->guard, s.sym) + " is false at " + s.abs_text(x)};
  }
  Execution ae = execute(s.abs, *opt.cmd, x);
  if (ae.domain_error) return Failure{Clause::Domain, domain_text(s, s.abs, *ae.domain_error)};
  if (ae.labels != ce.labels) {
    return Failure{Clause::Labels,
                   "concrete step emits " + label_list(ce.labels) + " but " + opt.text + " emits " + label_list(ae.labels)};
  }
  if (!s.related(ae.state, ce.state)) {
    return Failure{Clause::Coupling, s.rel.name + " fails between the results " + s.abs_text(ae.state) + " and " +
                                         s.conc_text(ce.state)};
  }
  x_next = std::move(ae.state);
  return std::nullopt;
}

struct ConcCmd {
  ConditionKind kind = ConditionKind::A;
  std::string label;
  std::string name;
  const Command* cmd = nullptr;
  std::vector<Option> search;  // candidates in declaration order
  std::map<std::string, std::vector<Option>> pinned;  // explicit choices per branch key ("*" = any)
  std::vector<BranchInfo> infos;
};

using GroupKey = std::pair<std::size_t, std::string>;

constexpr std::size_t kNoCandidate = static_cast<std::size_t>(-1);

struct Witness {
  GroupKey group;
  std::size_t candidate = 0;
  Failure failure;
  std::vector<Value> x;
  std::vector<Value> y;
};

class Engine {
 public:
  Engine(const Systems& s, std::vector<ConcCmd> cmds, bool explicit_mode, const CheckOptions& opts)
      : s_(s), cmds_(std::move(cmds)), explicit_(explicit_mode), opts_(opts), sx_(s.abs), sy_(s.conc) {}

  CheckReport run(Scope scope) {
    CheckReport r;
    r.abstract_name = s_.abs.name;
    r.concrete_name = s_.conc.name;
    r.relation = s_.rel.name;
    r.scope = scope;
    r.mode = explicit_ ? MappingMode::Explicit : MappingMode::Search;
    for (const auto& c : cmds_) {
      ConditionResult cr;
      cr.label = c.label;
      cr.kind = c.kind;
      cr.command = c.name;
      for (const auto& b : c.infos) {
        BranchResult br;
        br.key = b.key;
        br.condition = b.condition;
        br.update = b.update;
        br.labels = b.labels;
        cr.branches.push_back(std::move(br));
      }
      r.conditions.push_back(std::move(cr));
    }
    if (scope == Scope::AllPairs) {
      run_all_pairs(r);
    } else {
      run_reachable(r);
    }
    r.passed = std::all_of(r.conditions.begin(), r.conditions.end(),
                           [](const ConditionResult& c) { return c.status == Status::Pass; });
    return r;
  }

  void add_init_condition(CheckReport& r, bool ok) const {
    ConditionResult i;
    i.label = "I";
    i.kind = ConditionKind::I;
    i.command = "initialization";
    i.status = ok ? Status::Pass : Status::Fail;
    r.conditions.insert(r.conditions.begin(), std::move(i));
  }

  void fail_init(CheckReport& r, const std::vector<Value>& x0, const std::vector<Value>& y0) const {
    Counterexample cex;
    cex.condition = "I";
    cex.command = "initialization";
    cex.clause = Clause::Init;
    cex.abstract_state = x0;
    cex.concrete_state = y0;
    cex.abstract_text = s_.abs_text(x0);
    cex.concrete_text = s_.conc_text(y0);
    cex.detail = s_.rel.name + " does not relate the initial valuations";
    attach_context(cex);
    r.counterexample = std::move(cex);
  }

  // Rule 2 on its own has no initialization condition.
  void skip_init() { with_init_ = false; }

 private:
  const std::vector<Option>& candidates(const GroupKey& g) const {
    const ConcCmd& c = cmds_[g.first];
    // Domain errors ('!') fail whatever the choice.
    if (!explicit_ || c.kind == ConditionKind::M || (!g.second.empty() && g.second.back() == '!')) return c.search;
    auto it = c.pinned.find(g.second);
    if (it == c.pinned.end()) it = c.pinned.find("*");
    if (it == c.pinned.end()) {
      throw StructuralError("mapping has no choice for " + c.label + " (" + c.name + ") branch '" + g.second + "'");
    }
    return it->second;
  }

  void attach_context(Counterexample& cex) const {
    auto ctx = std::make_shared<ReplayContext>();
    ctx->symbols = s_.sym;
    ctx->abstract_system = s_.abs;
    ctx->concrete_system = s_.conc;
    ctx->relation = s_.rel;
    cex.context = std::move(ctx);
  }

  // How far a candidate got before failing; used to report the closest miss.
  static int progress(Clause c) {
    switch (c) {
      case Clause::Guard:
        return 1;
      case Clause::Domain:
        return 2;
      case Clause::Labels:
        return 3;
      case Clause::Coupling:
        return 4;
      case Clause::Init:
        break;
    }
    return 0;
  }

  Counterexample make_counterexample(const Witness& w) const {
    const ConcCmd& c = cmds_[w.group.first];
    const auto& cands = candidates(w.group);
    Execution ce = execute(s_.conc, *c.cmd, w.y);

    // Among the candidates that fail at the witness pair, report the one
    // that got furthest.
    std::size_t pick = w.candidate;
    Failure failure = w.failure;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      std::vector<Value> xn;
      auto f = step(s_, w.x, ce, cands[i], xn);
      if (f && progress(f->clause) > progress(failure.clause)) {
        pick = i;
        failure = *f;
      }
    }

    Counterexample cex;
    cex.condition = c.label;
    cex.command = c.name;
    cex.branch = w.group.second;
    cex.option = pick == kNoCandidate ? "none" : cands[pick].text;
    cex.clause = failure.clause;
    cex.detail = failure.detail;
    cex.abstract_state = w.x;
    cex.concrete_state = w.y;
    cex.abstract_text = s_.abs_text(w.x);
    cex.concrete_text = s_.conc_text(w.y);
    cex.concrete_command = *c.cmd;
    if (pick != kNoCandidate && cands[pick].cmd) cex.abstract_command = *cands[pick].cmd;
    for (const auto& opt : c.search) {
      std::vector<Value> xn;
      auto f = step(s_, w.x, ce, opt, xn);
      cex.alternatives.push_back({opt.text, f ? std::optional<Clause>(f->clause) : std::nullopt,
                                  f ? f->detail : "holds at this pair"});
    }
    attach_context(cex);
    return cex;
  }

  // ---- every related pair ----

  void run_all_pairs(CheckReport& r) {
    if (with_init_) {
      auto x0 = s_.abs.initial();
      auto y0 = s_.conc.initial();
      bool init_ok = s_.related(x0, y0);
      add_init_condition(r, init_ok);
      if (!init_ok) fail_init(r, x0, y0);
    }
    const std::size_t first = with_init_ ? 1 : 0;

    if (sx_.size() > opts_.max_pairs / std::max<std::uint64_t>(sy_.size(), 1)) {
      throw StructuralError("state product of " + s_.abs.name + " and " + s_.conc.name + " is too large to enumerate");
    }
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
    std::vector<Value> x;
    std::vector<Value> y;
    for (std::uint64_t xi = 0; xi < sx_.size(); ++xi) {
      sx_.decode(xi, x);
      for (std::uint64_t yi = 0; yi < sy_.size(); ++yi) {
        sy_.decode(yi, y);
        if (s_.related(x, y)) pairs.emplace_back(xi, yi);
      }
    }
    r.pairs_explored = pairs.size();
    r.explorations = 1;

    for (std::size_t k = 0; k < cmds_.size(); ++k) {
      const ConcCmd& c = cmds_[k];
      ConditionResult& cr = r.conditions[k + first];
      std::map<std::string, std::vector<std::size_t>> by_branch;
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        sy_.decode(pairs[p].second, y);
        if (!enabled(*c.cmd, y)) continue;
        by_branch[execute(s_.conc, *c.cmd, y).branch].push_back(p);
      }
      cr.status = Status::Pass;
      for (const auto& [key, members] : by_branch) {
        GroupKey g{k, key};
        const auto& cands = candidates(g);
        std::optional<Witness> last;
        std::optional<std::size_t> chosen;
        if (cands.empty()) {
          sx_.decode(pairs[members.front()].first, x);
          sy_.decode(pairs[members.front()].second, y);
          last = no_candidate(g, x, y);
        }
        for (std::size_t ci = 0; ci < cands.size() && !chosen; ++ci) {
          bool ok = true;
          for (std::size_t p : members) {
            sx_.decode(pairs[p].first, x);
            sy_.decode(pairs[p].second, y);
            Execution ce = execute(s_.conc, *c.cmd, y);
            std::vector<Value> xn;
            if (auto f = step(s_, x, ce, cands[ci], xn)) {
              last = Witness{g, ci, *f, x, y};
              ok = false;
              break;
            }
          }
          if (ok) chosen = ci;
        }
        BranchResult& br = branch_slot(cr, key);
        br.premises = members.size();
        if (chosen) {
          br.choice = cands[*chosen].text;
        } else {
          cr.status = Status::Fail;
          if (!r.counterexample) r.counterexample = make_counterexample(*last);
        }
      }
    }
  }

  static BranchResult& branch_slot(ConditionResult& cr, const std::string& key) {
    for (auto& b : cr.branches) {
      if (b.key == key) return b;
    }
    cr.branches.push_back(BranchResult{key, "", "", {}, "", 0});
    return cr.branches.back();
  }

  // ---- pairs reachable from the initial pair ----

  struct Exploration {
    enum class Kind { Pass, Need, Fail } kind = Kind::Pass;
    GroupKey group;
    Witness witness;
    std::map<GroupKey, std::uint64_t> premises;
    std::uint64_t pairs = 0;
  };

  Exploration explore(const std::map<GroupKey, std::size_t>& choice) const {
    Exploration e;
    std::unordered_set<std::uint64_t> seen;
    std::deque<std::pair<std::uint64_t, std::uint64_t>> queue;
    auto visit = [&](std::uint64_t xi, std::uint64_t yi) {
      if (seen.insert(xi * sy_.size() + yi).second) queue.emplace_back(xi, yi);
    };
    visit(*sx_.index(s_.abs.initial()), *sy_.index(s_.conc.initial()));
    std::vector<Value> x;
    std::vector<Value> y;
    while (!queue.empty()) {
      auto [xi, yi] = queue.front();
      queue.pop_front();
      sx_.decode(xi, x);
      sy_.decode(yi, y);
      for (std::size_t k = 0; k < cmds_.size(); ++k) {
        const Command& cmd = *cmds_[k].cmd;
        if (!enabled(cmd, y)) continue;
        Execution ce = execute(s_.conc, cmd, y);
        GroupKey g{k, ce.branch};
        ++e.premises[g];
        auto it = choice.find(g);
        if (it == choice.end()) {
          e.kind = Exploration::Kind::Need;
          e.group = g;
          e.witness = no_candidate(g, x, y);
          e.pairs = seen.size();
          return e;
        }
        std::vector<Value> xn;
        if (auto f = step(s_, x, ce, candidates(g)[it->second], xn)) {
          e.kind = Exploration::Kind::Fail;
          e.group = g;
          e.witness = Witness{g, it->second, *f, x, y};
          e.pairs = seen.size();
          return e;
        }
        visit(*sx_.index(xn), *sy_.index(ce.state));
      }
    }
    e.pairs = seen.size();
    return e;
  }

  Witness no_candidate(const GroupKey& g, std::span<const Value> x, std::span<const Value> y) const {
    return Witness{g, kNoCandidate,
                   Failure{Clause::Guard, s_.abs.name + " has no action for " + cmds_[g.first].name + " to refine"},
                   {x.begin(), x.end()}, {y.begin(), y.end()}};
  }

  // A pair where no candidate of the group can match the concrete step.
  bool dead_end(const Witness& w) const {
    Execution ce = execute(s_.conc, *cmds_[w.group.first].cmd, w.y);
    std::vector<Value> xn;
    for (const auto& opt : candidates(w.group)) {
      if (!step(s_, w.x, ce, opt, xn)) return false;
    }
    return true;
  }

  // Depth-first over the choices for the (command, branch) groups in the
  // order exploration meets them, candidates in declaration order.
  bool solve(std::map<GroupKey, std::size_t>& choice, Exploration& final) {
    if (++explorations_ > opts_.max_explorations) {
      throw StructuralError("gave up after " + std::to_string(opts_.max_explorations) +
                            " explorations searching for N/A choices");
    }
    Exploration e = explore(choice);
    pairs_ = std::max(pairs_, e.pairs);
    switch (e.kind) {
      case Exploration::Kind::Pass:
        final = std::move(e);
        return true;
      case Exploration::Kind::Fail: {
        if (!first_failure_) first_failure_ = e.witness;
        if (!dead_end_ && dead_end(e.witness)) dead_end_ = e.witness;
        if (!exhausted_failure_ && (e.witness.candidate + 1 == candidates(e.group).size() ||
                                    e.witness.failure.clause == Clause::Domain)) {
          exhausted_failure_ = e.witness;
        }
        return false;
      }
      case Exploration::Kind::Need:
        break;
    }
    std::size_t n = candidates(e.group).size();
    if (n == 0) {
      if (!first_failure_) first_failure_ = e.witness;
      if (!dead_end_) dead_end_ = e.witness;
      return false;
    }
    for (std::size_t ci = 0; ci < n; ++ci) {
      choice[e.group] = ci;
      if (solve(choice, final)) return true;
    }
    choice.erase(e.group);
    return false;
  }

  void run_reachable(CheckReport& r) {
    auto x0 = s_.abs.initial();
    auto y0 = s_.conc.initial();
    bool init_ok = s_.related(x0, y0);
    add_init_condition(r, init_ok);
    if (!init_ok) {
      fail_init(r, x0, y0);
      return;
    }
    std::map<GroupKey, std::size_t> choice;
    Exploration final;
    bool ok = solve(choice, final);
    r.pairs_explored = pairs_;
    r.explorations = explorations_;
    if (ok) {
      r.pairs_explored = final.pairs;
      for (std::size_t k = 0; k < cmds_.size(); ++k) {
        ConditionResult& cr = r.conditions[k + 1];
        cr.status = Status::Pass;
        for (const auto& [g, count] : final.premises) {
          if (g.first != k) continue;
          BranchResult& br = branch_slot(cr, g.second);
          br.premises = count;
          br.choice = candidates(g)[choice.at(g)].text;
        }
      }
      return;
    }
    const Witness& w = dead_end_ ? *dead_end_ : exhausted_failure_ ? *exhausted_failure_ : *first_failure_;
    r.counterexample = make_counterexample(w);
    r.conditions[w.group.first + 1].status = Status::Fail;
  }

  const Systems& s_;
  std::vector<ConcCmd> cmds_;
  bool explicit_;
  bool with_init_ = true;
  CheckOptions opts_;
  StateSpace sx_;
  StateSpace sy_;
  std::uint64_t explorations_ = 0;
  std::uint64_t pairs_ = 0;
  std::optional<Witness> first_failure_;
  std::optional<Witness> exhausted_failure_;
  std::optional<Witness> dead_end_;
};

std::string action_key(std::size_t j) { return "A" + std::to_string(j + 1); }

std::vector<Option> abstract_actions(const Gts& abs) {
  std::vector<Option> out;
  for (std::size_t i = 0; i < abs.actions.size(); ++i) out.push_back({&abs.actions[i], action_key(i)});
  return out;
}

Option resolve_option(const Gts& abs, const std::string& text, bool allow_skip, const std::string& where) {
  if (text == "skip") {
    if (!allow_skip) throw StructuralError(where + ": a concrete action must refine an abstract action, not skip");
    return {nullptr, "skip"};
  }
  for (std::size_t i = 0; i < abs.actions.size(); ++i) {
    if (text == action_key(i) || (!abs.actions[i].name.empty() && text == abs.actions[i].name)) {
      return {&abs.actions[i], action_key(i)};
    }
  }
  throw StructuralError(where + ": '" + text + "' names no action of " + abs.name);
}

void pin(ConcCmd& c, const BranchChoice& choice, const Gts& abs, const std::string& where) {
  for (const auto& [branch, text] : choice) {
    bool known = branch == "*" || std::any_of(c.infos.begin(), c.infos.end(),
                                              [&](const BranchInfo& b) { return b.key == branch; });
    if (!known) throw StructuralError(where + ": " + c.name + " has no branch '" + branch + "'");
    c.pinned[branch] = {resolve_option(abs, text, c.kind == ConditionKind::N, where)};
  }
}

std::vector<ConcCmd> plan(const SymbolTable& sym, const Gts& abs, const Gts& conc, const RefinementMapping& mapping) {
  for (const auto& m : abs.methods) {
    if (!conc.method_index(m.name)) {
      throw StructuralError("method " + abs.name + "." + m.name + " has no counterpart in " + conc.name);
    }
  }
  const bool pinned = mapping.mode == MappingMode::Explicit;
  std::vector<ConcCmd> shared;
  std::vector<ConcCmd> fresh;
  std::vector<ConcCmd> acts;
  std::set<std::string> used_methods;
  std::set<std::string> used_actions;
  for (const auto& m : conc.methods) {
    ConcCmd c;
    c.name = m.name;
    c.cmd = &m;
    c.infos = branches(conc, m, sym);
    if (auto ai = abs.method_index(m.name)) {
      c.kind = ConditionKind::M;
      c.label = "M" + std::to_string(shared.size() + 1);
      c.search.push_back({&abs.methods[*ai], m.name});
      if (pinned && mapping.new_methods.count(m.name)) {
        throw StructuralError("mapping: " + m.name + " is shared with " + abs.name + " and always maps to its namesake");
      }
      shared.push_back(std::move(c));
    } else {
      c.kind = ConditionKind::N;
      c.label = "N" + std::to_string(fresh.size() + 1);
      c.search.push_back({nullptr, "skip"});
      for (auto& o : abstract_actions(abs)) c.search.push_back(o);
      if (pinned) {
        auto it = mapping.new_methods.find(m.name);
        if (it == mapping.new_methods.end()) throw StructuralError("mapping: no entry for new method " + m.name);
        pin(c, it->second, abs, "mapping for " + m.name);
        used_methods.insert(m.name);
      }
      fresh.push_back(std::move(c));
    }
  }
  for (std::size_t j = 0; j < conc.actions.size(); ++j) {
    const Command& a = conc.actions[j];
    ConcCmd c;
    c.kind = ConditionKind::A;
    c.label = action_key(j);
    c.name = a.name.empty() ? "action " + print_command(a, sym) : a.name;
    c.cmd = &a;
    c.infos = branches(conc, a, sym);
    c.search = abstract_actions(abs);
    if (pinned) {
      auto it = mapping.actions.find(action_key(j));
      if (it == mapping.actions.end() && !a.name.empty()) it = mapping.actions.find(a.name);
      if (it == mapping.actions.end()) throw StructuralError("mapping: no entry for action " + c.label);
      used_actions.insert(it->first);
      pin(c, it->second, abs, "mapping for " + c.label);
    }
    acts.push_back(std::move(c));
  }
  if (pinned) {
    for (const auto& [name, bc] : mapping.new_methods) {
      (void)bc;
      if (!used_methods.count(name)) throw StructuralError("mapping names unknown new method '" + name + "'");
    }
    for (const auto& [name, bc] : mapping.actions) {
      (void)bc;
      if (!used_actions.count(name)) throw StructuralError("mapping names unknown concrete action '" + name + "'");
    }
  }
  std::vector<ConcCmd> out;
  for (auto* group : {&shared, &fresh, &acts}) {
    for (auto& c : *group) out.push_back(std::move(c));
  }
  return out;
}

// Relation arity/types and finiteness, before any enumeration starts.
void prepare(const Spec& spec, const Gts& abs, const Gts& conc, const Coupling& relation) {
  bind_coupling(spec, relation, abs, conc);
  StateSpace{abs};
  StateSpace{conc};
}

}  // namespace

CheckReport check_class_refinement(const Spec& spec, const Gts& abs, const Gts& conc, const Coupling& relation,
                                   const RefinementMapping& mapping, const CheckOptions& options) {
  prepare(spec, abs, conc, relation);
  Systems s{spec.symbols, abs, conc, relation};
  Engine engine(s, plan(spec.symbols, abs, conc, mapping), mapping.mode == MappingMode::Explicit, options);
  return engine.run(options.scope);
}

CheckReport check_class_refinement(const Spec& spec, const std::string& abs, const std::string& conc,
                                   const std::string& relation, const RefinementMapping& mapping,
                                   const CheckOptions& options) {
  const Gts* c = spec.find_system(abs);
  if (!c) throw StructuralError("no class named '" + abs + "'");
  const Gts* d = spec.find_system(conc);
  if (!d) throw StructuralError("no class named '" + conc + "'");
  const Coupling* r = spec.find_relation(relation);
  if (!r) throw StructuralError("no relation named '" + relation + "'");
  return check_class_refinement(spec, *c, *d, *r, mapping, options);
}

namespace {

CheckReport check_single(const Spec& spec, const Gts& abs, const Gts& conc, const Command& conc_cmd,
                         const Coupling& relation, const Command* abs_cmd) {
  prepare(spec, abs, conc, relation);
  Systems s{spec.symbols, abs, conc, relation};
  ConcCmd c;
  c.kind = abs_cmd ? ConditionKind::M : ConditionKind::N;
  c.label = abs_cmd ? "M" : "N";
  c.name = print_command(conc_cmd, spec.symbols);
  c.cmd = &conc_cmd;
  c.infos = branches(conc, conc_cmd, spec.symbols);
  c.search.push_back({abs_cmd, abs_cmd ? print_command(*abs_cmd, spec.symbols) : "skip"});
  std::vector<ConcCmd> cmds;
  cmds.push_back(std::move(c));
  Engine engine(s, std::move(cmds), false, CheckOptions{});
  engine.skip_init();
  return engine.run(Scope::AllPairs);
}

}  // namespace

CheckReport check_guarded_assignment(const Spec& spec, const Gts& abs, const Command& abs_cmd, const Gts& conc,
                                     const Command& conc_cmd, const Coupling& relation) {
  return check_single(spec, abs, conc, conc_cmd, relation, &abs_cmd);
}

CheckReport check_stutter(const Spec& spec, const Gts& abs, const Gts& conc, const Command& conc_cmd,
                          const Coupling& relation) {
  return check_single(spec, abs, conc, conc_cmd, relation, nullptr);
}

ReplayResult replay(const Counterexample& cex) {
  ReplayResult out;
  if (!cex.context) {
    out.detail = "counterexample carries no replay context";
    return out;
  }
  const ReplayContext& ctx = *cex.context;
  Systems s{ctx.symbols, ctx.abstract_system, ctx.concrete_system, ctx.relation};
  if (cex.clause == Clause::Init) {
    bool related = s.related(cex.abstract_state, cex.concrete_state);
    out.reproduced = !related;
    if (!related) out.clause = Clause::Init;
    out.detail = related ? "the initial valuations are related" : "the initial valuations are not related";
    return out;
  }
  if (!cex.concrete_command) {
    out.detail = "counterexample names no concrete command";
    return out;
  }
  if (!s.related(cex.abstract_state, cex.concrete_state)) {
    out.detail = "the witness pair is not related, so it is no premise";
    return out;
  }
  if (!enabled(*cex.concrete_command, cex.concrete_state)) {
    out.detail = "the concrete guard is false at the witness";
    return out;
  }
  if (cex.option == "none" && !cex.abstract_command) {
    out.reproduced = ctx.abstract_system.actions.empty() && cex.clause == Clause::Guard;
    if (out.reproduced) out.clause = Clause::Guard;
    out.detail = ctx.abstract_system.name + (ctx.abstract_system.actions.empty() ? " has no action to refine"
                                                                              : " has actions to refine");
    return out;
  }
  Execution ce = execute(ctx.concrete_system, *cex.concrete_command, cex.concrete_state);
  Option opt{cex.abstract_command ? &*cex.abstract_command : nullptr, cex.option};
  std::vector<Value> xn;
  auto f = step(s, cex.abstract_state, ce, opt, xn);
  if (!f) {
    out.detail = "the step refines its counterpart at the witness";
    return out;
  }
  out.clause = f->clause;
  out.detail = f->detail;
  out.reproduced = f->clause == cex.clause;
  return out;
}

namespace {

nlohmann::json state_json(const Gts& g, const std::vector<Value>& st, const SymbolTable& sym) {
  nlohmann::json out = nlohmann::json::object();
  for (std::size_t i = 0; i < g.fields.size() && i < st.size(); ++i) {
    const auto& t = g.fields[i].type;
    if (t.base == BaseType::Int) {
      out[g.fields[i].name] = st[i];
    } else if (t.base == BaseType::Bool) {
      out[g.fields[i].name] = st[i] != 0;
    } else {
      out[g.fields[i].name] = format_value(t, st[i], sym);
    }
  }
  return out;
}

}  // namespace

nlohmann::json CheckReport::to_json() const {
  nlohmann::json j;
  j["abstract"] = abstract_name;
  j["concrete"] = concrete_name;
  j["relation"] = relation;
  j["scope"] = to_string(scope);
  j["mode"] = to_string(mode);
  j["verdict"] = passed ? "pass" : "fail";
  j["pairs_explored"] = pairs_explored;
  j["explorations"] = explorations;
  j["conditions"] = nlohmann::json::array();
  for (const auto& c : conditions) {
    nlohmann::json cj;
    cj["label"] = c.label;
    cj["kind"] = to_string(c.kind);
    cj["command"] = c.command;
    cj["status"] = to_string(c.status);
    cj["branches"] = nlohmann::json::array();
    for (const auto& b : c.branches) {
      cj["branches"].push_back({{"key", b.key},
                                {"condition", b.condition},
                                {"update", b.update},
                                {"labels", b.labels},
                                {"choice", b.choice},
                                {"premises", b.premises}});
    }
    j["conditions"].push_back(std::move(cj));
  }
  if (counterexample) {
    const auto& x = *counterexample;
    nlohmann::json cj;
    cj["condition"] = x.condition;
    cj["command"] = x.command;
    cj["branch"] = x.branch;
    cj["option"] = x.option;
    cj["clause"] = to_string(x.clause);
    cj["detail"] = x.detail;
    if (x.context) {
      cj["abstract"] = state_json(x.context->abstract_system, x.abstract_state, x.context->symbols);
      cj["concrete"] = state_json(x.context->concrete_system, x.concrete_state, x.context->symbols);
    }
    cj["alternatives"] = nlohmann::json::array();
    for (const auto& a : x.alternatives) {
      cj["alternatives"].push_back({{"option", a.option},
                                    {"clause", a.clause ? nlohmann::json(to_string(*a.clause)) : nlohmann::json()},
                                    {"detail", a.detail}});
    }
    j["counterexample"] = std::move(cj);
  } else {
    j["counterexample"] = nullptr;
  }
  return j;
}

std::string CheckReport::to_text() const {
  std::ostringstream out;
  out << abstract_name << " refined by " << concrete_name << " under " << relation << " [" << to_string(scope) << ", "
      << to_string(mode) << "]: " << (passed ? "PASS" : "FAIL") << " (" << pairs_explored << " pairs";
  if (scope == Scope::Reachable) out << ", " << explorations << " explorations";
  out << ")\n";
  for (const auto& c : conditions) {
    out << "  " << c.label << " " << c.command << ": " << to_string(c.status) << "\n";
    for (const auto& b : c.branches) {
      out << "    ";
      if (!b.key.empty()) out << "[" << b.key << "] ";
      out << "when " << b.condition << ": " << b.update;
      if (!b.labels.empty()) out << " ; emit " << label_list(b.labels);
      if (!b.choice.empty()) {
        out << "  refines " << b.choice << " (" << b.premises << " pairs)";
      } else if (c.status == Status::Pass) {
        out << "  not exercised";
      }
      out << "\n";
    }
  }
  if (counterexample) {
    const auto& x = *counterexample;
    out << "counterexample: " << x.condition << " " << x.command;
    if (!x.branch.empty()) out << " branch " << x.branch;
    if (x.clause != Clause::Init) out << " against " << x.option;
    out << "\n  clause:   " << to_string(x.clause) << "\n  abstract: " << x.abstract_text
        << "\n  concrete: " << x.concrete_text << "\n  detail:   " << x.detail << "\n";
    for (const auto& a : x.alternatives) {
      out << "  with " << a.option << ": " << (a.clause ? to_string(*a.clause) : "ok") << " (" << a.detail << ")\n";
    }
  }
  return out.str();
}

}  // namespace northpole::refine
