#include "refinement/design_steps.hpp"

#include "refinement/parser.hpp"

namespace northpole::refine {

const Spec& santa_steps_spec() {
  static const Spec spec = parse_spec(embedded_santa_steps_text());
  return spec;
}

const std::vector<DesignStep>& design_steps() {
  static const std::vector<DesignStep> steps = [] {
    auto m = [](const char* json) { return RefinementMapping::parse(json); };
    return std::vector<DesignStep>{
        {1, "Santa0", "Santa1", "R1",
         m(R"({"actions": {"A1": "A1", "A2": "A1", "A3": "A2", "A4": "A2"}})"),
         {"I", "A1", "A2", "A3", "A4"}},
        {2, "Santa1", "Santa2", "R2",
         m(R"({"new_methods": {"back": "skip", "harness": "skip", "pull": "A3"},
               "actions": {"A1": "A1", "A2": "A2", "A3": "A4"}})"),
         {"I", "N1", "N2", "N3", "A1", "A2", "A3"}},
        {3, "Sleigh2", "Sleigh3", "R3",
         m(R"({"new_methods": {"back": {"F": "skip", "T": "A1"},
                               "harness": {"F": "skip", "T": "A2"},
                               "pull": {"F": "skip", "T": "A3"}}})"),
         {"I", "N1", "N2", "N3"}},
        {4, "Santa2", "Santa4", "R4",
         m(R"({"new_methods": {"puzzled": "skip", "enter": "skip", "consult": {"T": "skip", "F": "A3"}},
               "actions": {"A1": "A1", "A2": "A2"}})"),
         {"I", "M1", "M2", "M3", "N1", "N2", "N3", "A1", "A2"}},
        {5, "Shop4", "Shop5", "R5",
         m(R"({"new_methods": {"puzzled": {"F": "skip", "T": "A1"}, "enter": "A2", "consult": "A3"}})"),
         {"I", "N1", "N2", "N3"}},
    };
  }();
  return steps;
}

std::vector<CheckReport> check_all_design_steps(const CheckOptions& options) {
  std::vector<CheckReport> out;
  const Spec& spec = santa_steps_spec();
  for (const auto& step : design_steps()) {
    out.push_back(
        check_class_refinement(spec, step.abstract_class, step.concrete_class, step.relation, step.mapping, options));
  }
  return out;
}

}  // namespace northpole::refine
