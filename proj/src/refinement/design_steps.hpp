#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "refinement/ast.hpp"
#include "refinement/checker.hpp"
#include "refinement/mapping.hpp"

namespace northpole::refine {

// Text of data/santa_steps.gts, compiled in.
std::string_view embedded_santa_steps_text();

// Santa0 .. Shop5 with R1 .. R5, parsed once.
const Spec& santa_steps_spec();

struct DesignStep {
  int number = 0;
  std::string abstract_class;
  std::string concrete_class;
  std::string relation;
  // The choices for the "some i" of conditions N and A as argued by hand.
  RefinementMapping mapping;
  // Condition labels the hand proof discharges, in order.
  std::vector<std::string> conditions;
};

const std::vector<DesignStep>& design_steps();

// Checks every step with its pinned mapping over reachable pairs.
std::vector<CheckReport> check_all_design_steps(const CheckOptions& options = {});

}  // namespace northpole::refine
