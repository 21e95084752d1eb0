#pragma once

// Seeded faults in the Santa refinement fixtures. Each one is a single text
// substitution that should make its step fail.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "refinement/checker.hpp"

inline std::string apply_mutation(std::string_view text, const std::string& from, const std::string& to) {
  std::string s(text);
  const auto at = s.find(from);
  if (at == std::string::npos || s.find(from, at + 1) != std::string::npos) {
    throw std::logic_error("mutation site must occur exactly once: " + from);
  }
  s.replace(at, from.size(), to);
  return s;
}

struct Mutation {
  std::string name;
  std::string abstract_class;
  std::string concrete_class;
  std::string relation;
  northpole::refine::Scope scope = northpole::refine::Scope::Reachable;
  northpole::refine::Clause clause = northpole::refine::Clause::Coupling;
  std::string from;
  std::string to;

  std::string apply(std::string_view text) const { return apply_mutation(text, from, to); }
};

inline const std::vector<Mutation>& santa_mutations() {
  using northpole::refine::Clause;
  using northpole::refine::Scope;
  static const std::vector<Mutation> m = {
      {"Santa4.pull keeps b", "Santa2", "Santa4", "R4", Scope::Reachable, Clause::Coupling,
       "s = Riding -> s, b := Sleeping, false\n  method puzzled()", "s = Riding -> s := Sleeping\n  method puzzled()"},
      {"Santa2 wakeup guards swap b and not b", "Santa1", "Santa2", "R2", Scope::Reachable, Clause::Coupling,
       "action s = Sleeping and b -> s := Harnessing\n  action s = Sleeping and not b -> s := Helping\n  action s = "
       "Helping -> s := Sleeping\n\nclass Sleigh2",
       "action s = Sleeping and not b -> s := Harnessing\n  action s = Sleeping and b -> s := Helping\n  action s = "
       "Helping -> s := Sleeping\n\nclass Sleigh2"},
      {"Santa4 welcomes elves while the reindeer are back", "Santa2", "Santa4", "R4", Scope::Reachable,
       Clause::Coupling, "action s = Sleeping and p = 3 and not b -> s := Welcoming",
       "action s = Sleeping and p = 3 -> s := Welcoming"},
      {"Sleigh3.back resets the count to 0", "Sleigh2", "Sleigh3", "R3", Scope::Reachable, Clause::Coupling,
       "(s, c := Harnessing, 9 ; st.back())", "(s, c := Harnessing, 0 ; st.back())"},
      {"Sleigh3.pull resets the count to 0", "Sleigh2", "Sleigh3", "R3", Scope::Reachable, Clause::Coupling,
       "(s, c := Back, 9 ; st.pull())", "(s, c := Back, 0 ; st.pull())"},
      {"Shop5.consult ends the group one elf early", "Shop4", "Shop5", "R5", Scope::Reachable, Clause::Coupling,
       "method consult()\n    s = Consulting -> c := c - 1 ; if c > 0", "method consult()\n    s = Consulting -> c := c - 1 ; if c > 1"},
      {"Sleigh3.back forgets to notify Santa", "Sleigh2", "Sleigh3", "R3", Scope::Reachable, Clause::Coupling,
       "(s, c := Harnessing, 9 ; st.back())", "(s, c := Harnessing, 9)"},
      {"Shop5.enter forgets to notify Santa", "Shop4", "Shop5", "R5", Scope::Reachable, Clause::Coupling,
       "method enter()\n    s = Entering -> s := Consulting ; st.enter()",
       "method enter()\n    s = Entering -> s := Consulting"},
      {"Shop5.puzzled lets two elves in", "Shop4", "Shop5", "R5", Scope::Reachable, Clause::Coupling,
       "if c = 3 then (s := Entering ; st.puzzled())", "if c = 2 then (s := Entering ; st.puzzled())"},
      {"Shop5.consult notifies the wrong method", "Shop4", "Shop5", "R5", Scope::Reachable, Clause::Labels,
       "s := Puzzled ; st.consult()\n\nclass Elf5", "s := Puzzled ; st.enter()\n\nclass Elf5"},
      {"R1 weakened to an implication", "Santa0", "Santa1", "R1", Scope::AllPairs, Clause::Coupling,
       "s0 = Working <=> s1 in {Delivering, Helping}", "s0 = Working => s1 in {Delivering, Helping}"},
      {"R3 loses its lower bound", "Sleigh2", "Sleigh3", "R3", Scope::AllPairs, Clause::Domain,
       "s2 = s3 and 1 <= c3 and c3 <= 9", "s2 = s3 and c3 <= 9"},
  };
  return m;
}
