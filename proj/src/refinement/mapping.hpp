#pragma once

#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

namespace northpole::refine {

enum class MappingMode { Search, Explicit };

// Branch key ("T", "F", "FT", "" for straight-line bodies, "*" for any
// branch) to "skip" or an abstract action "A<i>" (1-based).
using BranchChoice = std::map<std::string, std::string>;

// Which abstract command each concrete command refines. Shared methods always
// map to their namesakes and need no entry. In Explicit mode every new method
// and every concrete action needs one; concrete actions are keyed "A<j>" in
// declaration order, or by name when they have one.
struct RefinementMapping {
  MappingMode mode = MappingMode::Search;
  std::map<std::string, BranchChoice> new_methods;
  std::map<std::string, BranchChoice> actions;

  static RefinementMapping search() { return {}; }
  // {"new_methods": {"back": "skip", "consult": {"T": "skip", "F": "A3"}},
  //  "actions": {"A1": "A1"}}; yields an Explicit mapping. Throws
  // std::invalid_argument on malformed input.
  static RefinementMapping from_json(const nlohmann::json& j);
  static RefinementMapping parse(std::string_view text);
  static RefinementMapping load_file(const std::string& path);

  nlohmann::json to_json() const;
  const std::string* choice(const std::map<std::string, BranchChoice>& table, const std::string& command,
                            const std::string& branch) const;
};

}  // namespace northpole::refine
