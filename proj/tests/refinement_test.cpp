#include <doctest.h>

#include <chrono>
#include <fstream>

#include "refinement/checker.hpp"
#include "refinement/gts.hpp"
#include "refinement/mapping.hpp"
#include "refinement/design_steps.hpp"
#include "refinement/parser.hpp"
#include "refinement/printer.hpp"
#include "support/mutations.hpp"
#include "support/random_gts.hpp"

using namespace northpole;
using namespace northpole::refine;

namespace {

const Gts& sys(const Spec& spec, const char* name) {
  const Gts* g = spec.find_system(name);
  REQUIRE(g != nullptr);
  return *g;
}

const Coupling& rel(const Spec& spec, const char* name) {
  const Coupling* r = spec.find_relation(name);
  REQUIRE(r != nullptr);
  return *r;
}

Value sym(const Spec& spec, const char* label) {
  auto v = spec.symbols.find(label);
  REQUIRE(v.has_value());
  return *v;
}

std::string data_file(const char* name) { return std::string(NORTHPOLE_SOURCE_DIR) + "/data/" + name; }

}  // namespace

// ---- parsing ----

TEST_CASE("santa0.gts has two states, no methods and two actions") {
  Spec spec = load_spec_file(data_file("santa0.gts"));
  REQUIRE(spec.systems.size() == 1);
  const Gts& g = spec.systems[0];
  CHECK(g.name == "Santa0");
  CHECK(g.fields.size() == 1);
  CHECK(StateSpace(g).size() == 2);
  CHECK(g.methods.empty());
  CHECK(g.actions.size() == 2);
  CHECK(g.initial() == std::vector<Value>{sym(spec, "Sleeping")});
}

TEST_CASE("empty input gives an empty spec") {
  Spec spec = parse_spec("");
  CHECK(spec.systems.empty());
  CHECK(spec.relations.empty());
  CHECK(parse_spec("  # only a comment\n\n").systems.empty());
}

TEST_CASE("an initial value outside its range is reported at the declaration") {
  const char* text = "class Sleigh\n  var c: 0 .. 9 = 10\n";
  try {
    parse_spec(text);
    FAIL("expected a SpecError");
  } catch (const SpecError& e) {
    CHECK(e.pos().line == 2);
    CHECK(e.pos().column >= 3);
    CHECK(std::string(e.what()).find("2:") != std::string::npos);
  }
}

TEST_CASE("parse errors carry positions") {
  struct Bad {
    const char* text;
    int line;
    const char* fragment;
  };
  const Bad cases[] = {
      {"class A\n  var s: {X, Y} = X\n  action s = Z -> s := Y\n", 3, "Z"},
      {"class A\n  var c: 0 .. 3 = 0\n  action c := 4\n", 3, "outside"},
      {"class A\n  var c: 0 .. 3 = 0\nclass B\n  var d: 0 .. 3 = 0\ncouple R (c) (d) :: c = d d\n", 5,
       "malformed relation"},
      {"class A\n  var c: 0 .. 3 = 0\n  var c: 0 .. 1 = 0\n", 3, "duplicate"},
      {"class A\n  var s: {X, Y} = X\n  action s := 1\n", 3, "type"},
      {"class A\n  var c: 0 .. 3 = 0\n  action c = 1 -> d := 2\n", 3, "unknown identifier"},
      {"class A\n  var s: {X, Y} = W\n", 2, "W"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.text);
    try {
      parse_spec(c.text);
      FAIL("expected a SpecError");
    } catch (const SpecError& e) {
      CHECK(e.pos().line == c.line);
      CHECK(std::string(e.what()).find(c.fragment) != std::string::npos);
    }
  }
}

TEST_CASE("operators have ASCII and symbolic spellings") {
  const char* ascii =
      "class A\n  var s: {X, Y} = X\n  var b: boolean = false\n"
      "  action s = X and not b -> s := Y\n"
      "class B\n  var t: {X, Y} = X\n  var c: 0 .. 2 = 0\n"
      "couple R (s, b) (t, c) :: (s = t <=> c <= 1) and (b => c != 2)\n";
  const char* symbolic =
      "class A\n  var s: {X, Y} = X\n  var b: boolean = false\n"
      "  action s = X ∧ ¬b → s := Y\n"
      "class B\n  var t: {X, Y} = X\n  var c: 0 .. 2 = 0\n"
      "couple R (s, b) (t, c) :: (s = t ⇔ c ≤ 1) ∧ (b ⇒ c ≠ 2)\n";
  CHECK(parse_spec(ascii) == parse_spec(symbolic));
}

TEST_CASE("chained comparisons mean a conjunction") {
  Spec a = parse_spec("class A\n  var c: 0 .. 9 = 1\n  action 1 <= c <= 3 -> c := 0\n");
  Spec b = parse_spec("class A\n  var c: 0 .. 9 = 1\n  action 1 <= c and c <= 3 -> c := 0\n");
  CHECK(a == b);
}

TEST_CASE("branches are stated over the pre-state") {
  const Spec& spec = santa_steps_spec();
  const Gts& sleigh = sys(spec, "Sleigh3");
  auto br = branches(sleigh, sleigh.methods[0], spec.symbols);
  REQUIRE(br.size() == 2);
  CHECK(br[0].key == "T");
  CHECK(br[0].condition.find("(c - 1) = 0") != std::string::npos);
  CHECK(br[0].labels == std::vector<std::string>{"st.back"});
  CHECK(br[1].key == "F");
  CHECK(br[1].labels.empty());
}

TEST_CASE("printing and parsing round-trip") {
  const Spec& spec = santa_steps_spec();
  Spec again = parse_spec(print_spec(spec));
  CHECK(again == spec);
  CHECK(print_spec(again) == print_spec(spec));
  for (const auto& g : spec.systems) {
    Spec one = parse_spec(print_system(g, spec.symbols));
    REQUIRE(one.systems.size() == 1);
    CHECK(one.systems[0].name == g.name);
    CHECK(print_system(one.systems[0], one.symbols) == print_system(g, spec.symbols));
  }

  oracle::Generator gen(99);
  for (int i = 0; i < 40; ++i) {
    auto in = gen.next();
    Spec s = parse_spec(in.text());
    CHECK(parse_spec(print_spec(s)) == s);
  }
}

// ---- guarded assignment and stutter ----

TEST_CASE("guarded assignment refinement between Santa0 and Santa1") {
  const Spec& spec = santa_steps_spec();
  const Gts& s0 = sys(spec, "Santa0");
  const Gts& s1 = sys(spec, "Santa1");
  const Coupling& r1 = rel(spec, "R1");
  Command abs = parse_command(spec, s0, "s = Sleeping -> s := Working");

  auto ok = check_guarded_assignment(spec, s0, abs, s1, parse_command(spec, s1, "s = Sleeping -> s := Delivering"), r1);
  CHECK(ok.passed);

  auto bad = check_guarded_assignment(spec, s0, abs, s1, parse_command(spec, s1, "s = Sleeping -> s := Sleeping"), r1);
  CHECK_FALSE(bad.passed);
  REQUIRE(bad.counterexample.has_value());
  CHECK(bad.counterexample->clause == Clause::Coupling);
  CHECK(bad.counterexample->abstract_state == std::vector<Value>{sym(spec, "Sleeping")});
  CHECK(bad.counterexample->concrete_state == std::vector<Value>{sym(spec, "Sleeping")});
  CHECK(replay(*bad.counterexample).reproduced);
}

TEST_CASE("a command refines itself under the identity relation") {
  Spec spec = parse_spec(std::string(embedded_santa_steps_text()) +
                         "\ncouple Id (a, b, p) (x, y, q) :: a = x and b = y and p = q\n"
                         "couple Id2 (a, b) (x, y) :: a = x and b = y\n");
  const Gts& s2 = sys(spec, "Santa2");
  for (const auto* cmds : {&s2.methods, &s2.actions}) {
    for (const auto& c : *cmds) {
      CAPTURE(print_command(c, spec.symbols));
      CHECK(check_guarded_assignment(spec, s2, c, s2, c, rel(spec, "Id2")).passed);
    }
  }
  // Identity admits p = 0 while consulting, where consult leaves 0 .. 3 on
  // both sides alike.
  const Gts& s4 = sys(spec, "Santa4");
  auto r = check_guarded_assignment(spec, s4, s4.methods[5], s4, s4.methods[5], rel(spec, "Id"));
  CHECK_FALSE(r.passed);
  REQUIRE(r.counterexample.has_value());
  CHECK(r.counterexample->clause == Clause::Domain);
  CHECK(check_guarded_assignment(spec, s4, s4.methods[4], s4, s4.methods[4], rel(spec, "Id")).passed);
}

TEST_CASE("stutter checks") {
  const Spec& spec = santa_steps_spec();
  const Gts& s1 = sys(spec, "Santa1");
  const Gts& s2 = sys(spec, "Santa2");
  CHECK(check_stutter(spec, s1, s2, s2.methods[0], rel(spec, "R2")).passed);
  CHECK(check_stutter(spec, s1, s2, s2.methods[1], rel(spec, "R2")).passed);
  CHECK(check_stutter(spec, s1, s2, parse_command(spec, s2, "skip"), rel(spec, "R2")).passed);
  CHECK(check_stutter(spec, sys(spec, "Santa0"), s1, parse_command(spec, s1, "skip"), rel(spec, "R1")).passed);

  const Gts& sl2 = sys(spec, "Sleigh2");
  const Gts& sl3 = sys(spec, "Sleigh3");
  auto r = check_stutter(spec, sl2, sl3, sl3.methods[0], rel(spec, "R3"));
  CHECK_FALSE(r.passed);
  REQUIRE(r.counterexample.has_value());
  CHECK(r.counterexample->clause == Clause::Labels);
  CHECK(r.counterexample->branch == "T");
  CHECK(replay(*r.counterexample).reproduced);
}

// ---- class refinement on the Santa steps ----

TEST_CASE("all five Santa steps pass with the conditions argued by hand") {
  auto t0 = std::chrono::steady_clock::now();
  auto reports = check_all_design_steps();
  const auto& steps = design_steps();
  REQUIRE(reports.size() == 5);
  const std::vector<std::vector<std::string>> expected = {
      {"I", "A1", "A2", "A3", "A4"},
      {"I", "N1", "N2", "N3", "A1", "A2", "A3"},
      {"I", "N1", "N2", "N3"},
      {"I", "M1", "M2", "M3", "N1", "N2", "N3", "A1", "A2"},
      {"I", "N1", "N2", "N3"},
  };
  for (std::size_t i = 0; i < 5; ++i) {
    CAPTURE(i + 1);
    CHECK(reports[i].passed);
    CHECK(reports[i].mode == MappingMode::Explicit);
    CHECK(steps[i].conditions == expected[i]);
    std::vector<std::string> labels;
    for (const auto& c : reports[i].conditions) {
      labels.push_back(c.label);
      CHECK(c.status == Status::Pass);
    }
    CHECK(labels == expected[i]);
  }
  CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(10));
}

TEST_CASE("search mode finds choices for every step") {
  for (const auto& step : design_steps()) {
    CAPTURE(step.number);
    auto r = check_class_refinement(santa_steps_spec(), step.abstract_class, step.concrete_class, step.relation);
    CHECK(r.passed);
    CHECK(r.mode == MappingMode::Search);
  }
}

TEST_CASE("step 3 splits the countdown into c > 1 and c = 1") {
  auto r = check_all_design_steps()[2];
  for (const char* n : {"N1", "N2", "N3"}) {
    CAPTURE(n);
    const ConditionResult* c = r.find(n);
    REQUIRE(c != nullptr);
    REQUIRE(c->branches.size() == 2);
    const BranchResult& t = c->branches[0].key == "T" ? c->branches[0] : c->branches[1];
    const BranchResult& f = c->branches[0].key == "F" ? c->branches[0] : c->branches[1];
    CHECK(t.condition.find("(c - 1) = 0") != std::string::npos);
    CHECK(t.choice.rfind("A", 0) == 0);
    CHECK(f.choice == "skip");
    CHECK(t.premises > 0);
    CHECK(f.premises > 0);
  }
  CHECK(r.find("N1")->branches[0].premises + r.find("N1")->branches[1].premises >= 9);
}

TEST_CASE("step 4 consult stutters or refines the help action") {
  auto r = check_all_design_steps()[3];
  const ConditionResult* n3 = r.find("N3");
  REQUIRE(n3 != nullptr);
  CHECK(n3->command.find("consult") != std::string::npos);
  std::map<std::string, std::string> choice;
  for (const auto& b : n3->branches) choice[b.key] = b.choice;
  CHECK(choice["T"] == "skip");
  CHECK(choice["F"] == "A3");
}

TEST_CASE("step 5 puzzled refines the action when the third elf arrives") {
  auto r = check_all_design_steps()[4];
  const ConditionResult* n1 = r.find("N1");
  REQUIRE(n1 != nullptr);
  for (const auto& b : n1->branches) {
    if (b.key == "T") {
      CHECK(b.choice == "A1");
      CHECK(b.labels == std::vector<std::string>{"st.puzzled"});
    } else {
      CHECK(b.choice == "skip");
    }
  }
}

TEST_CASE("the all-pairs scope is stricter than the reachable scope") {
  CheckOptions all;
  all.scope = Scope::AllPairs;
  const bool expected[] = {true, false, true, false, false};
  for (const auto& step : design_steps()) {
    CAPTURE(step.number);
    auto a = check_class_refinement(santa_steps_spec(), step.abstract_class, step.concrete_class, step.relation,
                                    step.mapping, all);
    CHECK(a.passed == expected[step.number - 1]);
    if (!a.passed) {
      REQUIRE(a.counterexample.has_value());
      CHECK(replay(*a.counterexample).reproduced);
    }
  }
}

TEST_CASE("Santa2 without the reset of b in pull") {
  std::string text(embedded_santa_steps_text());
  std::string mutated = apply_mutation(text, "s = Riding -> s, b := Sleeping, false\n  action", "s = Riding -> s := Sleeping\n  action");
  Spec spec = parse_spec(mutated);
  // Every state the pair can reach still corresponds to an abstract one.
  CHECK(check_class_refinement(spec, "Santa1", "Santa2", "R2").passed);
  CheckOptions all;
  all.scope = Scope::AllPairs;
  auto r = check_class_refinement(spec, "Santa1", "Santa2", "R2", {}, all);
  CHECK_FALSE(r.passed);
}

TEST_CASE("seeded mutations fail with replayable counterexamples") {
  const auto& muts = santa_mutations();
  REQUIRE(muts.size() >= 10);
  for (const auto& m : muts) {
    CAPTURE(m.name);
    Spec spec = parse_spec(m.apply(embedded_santa_steps_text()));
    CheckOptions opts;
    opts.scope = m.scope;
    auto r = check_class_refinement(spec, m.abstract_class, m.concrete_class, m.relation, {}, opts);
    CHECK_FALSE(r.passed);
    REQUIRE(r.counterexample.has_value());
    CHECK(r.counterexample->clause == m.clause);
    auto rp = replay(*r.counterexample);
    CHECK(rp.reproduced);
    REQUIRE(rp.clause.has_value());
    CHECK(*rp.clause == r.counterexample->clause);
    CHECK(r.to_json().contains("counterexample"));
    CHECK(r.to_text().find("counterexample") != std::string::npos);
  }
}

TEST_CASE("explicit mappings are honored and validated") {
  const auto& step2 = design_steps()[1];
  RefinementMapping wrong = step2.mapping;
  wrong.actions["A1"] = {{"*", "A2"}};
  auto r = check_class_refinement(santa_steps_spec(), step2.abstract_class, step2.concrete_class, step2.relation,
                                  wrong);
  CHECK_FALSE(r.passed);
  REQUIRE(r.counterexample.has_value());
  CHECK(r.counterexample->condition == "A1");
  CHECK(replay(*r.counterexample).reproduced);

  RefinementMapping dangling = step2.mapping;
  dangling.actions["A9"] = {{"*", "A1"}};
  CHECK_THROWS_AS(check_class_refinement(santa_steps_spec(), step2.abstract_class, step2.concrete_class,
                                         step2.relation, dangling),
                  StructuralError);

  auto parsed = RefinementMapping::parse(R"({"new_methods": {"back": "skip", "harness": "skip", "pull": "A3"},
                                            "actions": {"A1": "A1", "A2": "A2", "A3": "A4"}})");
  CHECK(parsed.mode == MappingMode::Explicit);
  CHECK(check_class_refinement(santa_steps_spec(), "Santa1", "Santa2", "R2", parsed).passed);
  CHECK(RefinementMapping::from_json(parsed.to_json()).to_json() == parsed.to_json());
  CHECK_THROWS_AS(RefinementMapping::parse(R"({"bogus": {}})"), std::invalid_argument);
  CHECK_THROWS_AS(RefinementMapping::parse("not json"), std::invalid_argument);
}

TEST_CASE("structural errors are raised before checking") {
  const Spec& spec = santa_steps_spec();
  // Santa1 lacks Santa2's methods.
  CHECK_THROWS_AS(check_class_refinement(spec, "Santa2", "Santa1", "R2"), StructuralError);
  // R1 relates one field to one field.
  CHECK_THROWS_AS(check_class_refinement(spec, "Santa1", "Santa2", "R1"), StructuralError);
  CHECK_THROWS_AS(check_class_refinement(spec, "Santa1", "Nobody", "R2"), StructuralError);
  CHECK_THROWS_AS(check_class_refinement(spec, "Santa1", "Santa2", "R9"), StructuralError);

  Spec unbounded = parse_spec("class A\n  var n: int = 0\n  action n := n + 1\ncouple R (a) (b) :: a = b\n");
  CHECK_THROWS_AS(check_class_refinement(unbounded, "A", "A", "R"), StructuralError);
}

TEST_CASE("reports serialize their verdicts") {
  auto r = check_all_design_steps()[0];
  auto j = r.to_json();
  CHECK(j["verdict"] == "pass");
  CHECK(j["abstract"] == "Santa0");
  CHECK(j["conditions"].size() == 5);
  CHECK(r.to_text().find("PASS") != std::string::npos);
}

// ---- oracle agreement ----

TEST_CASE("random systems: the checker agrees with brute force in both scopes") {
  oracle::Generator gen(20240611);
  int compared = 0;
  int passes[2] = {0, 0};
  int fails[2] = {0, 0};
  for (int i = 0; i < 300; ++i) {
    auto in = gen.next();
    auto verdict = oracle::decide(in.abs, in.conc, in.rel);
    if (!verdict.reachable) continue;
    CAPTURE(in.text());
    Spec spec = parse_spec(in.text());
    CheckOptions all;
    all.scope = Scope::AllPairs;
    auto a = check_class_refinement(spec, "Abs", "Conc", "R", {}, all);
    auto r = check_class_refinement(spec, "Abs", "Conc", "R");
    CHECK(a.passed == verdict.all_pairs);
    CHECK(r.passed == *verdict.reachable);
    // Whatever holds for every coupled pair holds for the reachable ones.
    if (a.passed) CHECK(r.passed);
    for (const auto* rep : {&a, &r}) {
      if (!rep->passed) {
        REQUIRE(rep->counterexample.has_value());
        CHECK(replay(*rep->counterexample).reproduced);
      }
    }
    (verdict.all_pairs ? passes : fails)[0]++;
    (*verdict.reachable ? passes : fails)[1]++;
    ++compared;
  }
  MESSAGE("compared " << compared << " systems; all-pairs " << passes[0] << " pass / " << fails[0]
                      << " fail; reachable " << passes[1] << " pass / " << fails[1] << " fail");
  CHECK(compared >= 200);
  CHECK(passes[0] > 0);
  CHECK(fails[0] > 0);
  CHECK(passes[1] > 0);
  CHECK(fails[1] > 0);
}
