// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any fail.

#include <chrono>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "backends/driver.hpp"
#include "harness/bench.hpp"
#include "harness/validator.hpp"
#include "refinement/checker.hpp"
#include "refinement/design_steps.hpp"
#include "refinement/parser.hpp"
#include "runtime/runtime.hpp"
#include "santa/santa_model.hpp"
#include "support/mutations.hpp"
#include "support/random_gts.hpp"

using namespace northpole;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool ok = true;
  std::ostringstream why;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      why << " [" << what << "]";
    }
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

santa::ScenarioConfig scaled(std::uint64_t rounds) {
  santa::ScenarioConfig cfg;
  cfg.santa_rounds = rounds;
  cfg.reindeer_cycles = rounds / 5;
  return cfg;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
  return out;
}

// ---- AC1 ----

void ac1(Verdict& v, std::ostringstream& info) {
  namespace rf = refine;
  const auto t0 = Clock::now();
  const std::vector<std::vector<std::string>> expected = {
      {"I", "A1", "A2", "A3", "A4"},
      {"I", "N1", "N2", "N3", "A1", "A2", "A3"},
      {"I", "N1", "N2", "N3"},
      {"I", "M1", "M2", "M3", "N1", "N2", "N3", "A1", "A2"},
      {"I", "N1", "N2", "N3"},
  };
  auto reports = rf::check_all_design_steps();
  v.require(reports.size() == 5, "five steps");
  for (std::size_t i = 0; i < reports.size() && i < expected.size(); ++i) {
    const auto& r = reports[i];
    std::vector<std::string> labels;
    bool all_pass = true;
    for (const auto& c : r.conditions) {
      labels.push_back(c.label);
      all_pass = all_pass && c.status == rf::Status::Pass;
    }
    const std::string step = "step " + std::to_string(i + 1);
    v.require(r.passed && all_pass, step + " passes");
    v.require(labels == expected[i], step + " conditions " + join(labels));
  }

  int failed = 0;
  const auto& muts = santa_mutations();
  for (const auto& m : muts) {
    rf::Spec spec = rf::parse_spec(m.apply(rf::embedded_santa_steps_text()));
    rf::CheckOptions opts;
    opts.scope = m.scope;
    auto r = rf::check_class_refinement(spec, m.abstract_class, m.concrete_class, m.relation, {}, opts);
    const bool replayed = r.counterexample && rf::replay(*r.counterexample).reproduced;
    if (!r.passed && replayed) {
      ++failed;
    } else {
      v.require(false, "mutation '" + m.name + "' not caught with a replayable counterexample");
    }
  }
  v.require(muts.size() >= 10, "at least ten mutations");
  const double t = seconds_since(t0);
  v.require(t < 10.0, "under 10 s");
  info << "5 steps pass; " << failed << "/" << muts.size() << " mutations fail and replay; " << t << " s";
}

// ---- AC2 ----

void ac2(Verdict& v, std::ostringstream& info) {
  auto big = backends::run_guards(scaled(10000), nullptr);
  auto small = backends::run_guards(scaled(100), nullptr);
  v.require(big.deliveries == 2000 && big.help_sessions == 8000, "10,000 rounds split 2000/8000");
  v.require(small.deliveries == 20 && small.help_sessions == 80, "100 rounds split 20/80");
  info << "10,000 rounds: " << big.deliveries << "/" << big.help_sessions << "; 100 rounds: " << small.deliveries
       << "/" << small.help_sessions;
}

// ---- AC3 ----

void ac3(Verdict& v, std::ostringstream& info) {
  for (std::uint64_t rounds : {100ull, 10000ull}) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> counts;
    for (auto b : backends::kAllBackends) {
      trace::MemorySink sink;
      const auto t0 = Clock::now();
      auto st = backends::run_backend(b, scaled(rounds), &sink);
      const double t = seconds_since(t0);
      auto violations = harness::validate_trace(sink.events(), {}, &st);
      const std::string tag = std::string(backends::to_string(b)) + "@" + std::to_string(rounds);
      v.require(st.outcome == backends::Outcome::Completed, tag + " completes");
      v.require(violations.empty(), tag + " has " + std::to_string(violations.size()) + " violations");
      v.require(t < 60.0, tag + " under 60 s");
      counts.emplace_back(st.deliveries, st.help_sessions);
      if (rounds == 10000) info << tag << " " << t << " s; ";
    }
    for (const auto& c : counts) v.require(c == counts.front(), "identical counts at " + std::to_string(rounds));
    info << rounds << " rounds: " << counts.front().first << "/" << counts.front().second << " everywhere"
         << (rounds == 100 ? "; " : "");
  }
}

// ---- AC4 ----

void ac4(Verdict& v, std::ostringstream& info) {
  santa::ScenarioConfig cfg;
  cfg.reindeer_count = 8;
  cfg.barrier_size = 9;
  cfg.santa_rounds = 1000;
  auto st = backends::run_guards(cfg, nullptr);
  v.require(st.deliveries == 0 && st.help_sessions == 1000, "0/1000");
  info << st.deliveries << "/" << st.help_sessions;
}

// ---- AC5 ----

void ac5(Verdict& v, std::ostringstream& info) {
  harness::BenchConfig guards;
  guards.levels = {10000, 100000};
  guards.runs_per_level = 3;
  auto g = harness::run_benchmark(guards);
  v.require(!g.flagged, "guards bench not flagged");
  const double ratio = !g.ratios.empty() && g.ratios[0] ? *g.ratios[0] : -1.0;
  v.require(ratio >= 5.0 && ratio <= 20.0, "ratio within [5, 20]");

  harness::BenchConfig monitor;
  monitor.backend = backends::Backend::Monitor;
  monitor.levels = {10000};
  auto m = harness::run_benchmark(monitor);
  const auto gt = g.levels[0].median_wall_s;
  const auto mt = m.levels[0].median_wall_s;
  v.require(gt && mt && *mt > *gt, "monitor slower than guards at 10,000 rounds");
  info << "guards " << gt.value_or(-1) << " s -> " << g.levels[1].median_wall_s.value_or(-1)
       << " s, ratio " << ratio << "; monitor " << mt.value_or(-1) << " s";
}

// ---- AC6 ----

void ac6(Verdict& v, std::ostringstream& info) {
  // Exclusion and non-reentrancy over a full default run of 10^5 rounds.
  runtime::Runtime rt;
  santa::ScenarioConfig cfg;
  auto sc = santa::build_scenario(rt, cfg);
  auto outcome = rt.run(santa::santa_sleeps(sc, 100000));
  v.require(outcome == runtime::RunOutcome::Stopped, "10^5 default rounds never deadlock");
  std::vector<runtime::ObjectHandle> all = {sc.santa, sc.sleigh, sc.shop};
  all.insert(all.end(), sc.reindeer.begin(), sc.reindeer.end());
  all.insert(all.end(), sc.elves.begin(), sc.elves.end());
  std::uint64_t exclusion = 0;
  std::uint64_t reentrant = 0;
  std::uint64_t max_suspended = 0;
  for (auto h : all) {
    auto s = rt.stats(h);
    exclusion += s.exclusion_violations;
    reentrant += s.reentrant_action_starts;
    max_suspended = std::max(max_suspended, s.max_suspended_actions);
  }
  v.require(exclusion == 0, "exclusion counter never above 1");
  v.require(reentrant == 0 && max_suspended <= 1, "no action started while one is suspended");

  santa::ScenarioConfig stuck;
  stuck.reindeer_count = 8;
  stuck.elf_count = 0;
  stuck.santa_rounds = 10;
  auto st = backends::run_guards(stuck, nullptr);
  v.require(st.outcome == backends::Outcome::Deadlocked, "8 reindeer / 0 elves deadlocks");
  info << "10^5 rounds: " << runtime::to_string(outcome) << ", exclusion violations " << exclusion
       << ", reentrant starts " << reentrant << "; 8 reindeer / 0 elves: " << backends::to_string(st.outcome);
}

// ---- AC7 ----

void ac7(Verdict& v, std::ostringstream& info) {
  namespace rf = refine;
  oracle::Generator gen(7);
  int compared = 0;
  int agree = 0;
  for (int i = 0; i < 40; ++i) {
    auto in = gen.next();
    if (in.rel.abs_size * in.rel.conc_size > 10000) continue;
    auto truth = oracle::decide(in.abs, in.conc, in.rel);
    if (!truth.reachable) continue;
    rf::Spec spec = rf::parse_spec(in.text());
    rf::CheckOptions all;
    all.scope = rf::Scope::AllPairs;
    auto a = rf::check_class_refinement(spec, "Abs", "Conc", "R", {}, all);
    auto r = rf::check_class_refinement(spec, "Abs", "Conc", "R");
    ++compared;
    if (a.passed == truth.all_pairs && r.passed == *truth.reachable) ++agree;
  }
  v.require(compared >= 3, "at least 3 systems compared");
  v.require(agree == compared, "checker agrees with the oracle");
  info << agree << "/" << compared << " random systems agree in both scopes";
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* title;
    void (*run)(Verdict&, std::ostringstream&);
  };
  const Criterion criteria[] = {
      {"AC1", "refinement suite", ac1},         {"AC2", "workload split", ac2},
      {"AC3", "cross-backend equivalence", ac3}, {"AC4", "degenerate reindeer", ac4},
      {"AC5", "scaling shape", ac5},            {"AC6", "runtime properties", ac6},
      {"AC7", "oracle equivalence", ac7},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Verdict v;
    std::ostringstream info;
    try {
      c.run(v, info);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    if (!v.ok) ++failures;
    std::printf("%s %s %s: %s%s\n", v.ok ? "PASS" : "FAIL", c.id, c.title, info.str().c_str(), v.why.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
