#include "refinement/mapping.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace northpole::refine {

namespace {

std::map<std::string, BranchChoice> read_table(const nlohmann::json& j, const char* key) {
  std::map<std::string, BranchChoice> out;
  if (!j.contains(key)) return out;
  const auto& t = j.at(key);
  if (!t.is_object()) throw std::invalid_argument(std::string("mapping: '") + key + "' must be an object");
  for (const auto& [cmd, v] : t.items()) {
    BranchChoice bc;
    if (v.is_string()) {
      bc["*"] = v.get<std::string>();
    } else if (v.is_object()) {
      for (const auto& [branch, target] : v.items()) {
        if (!target.is_string()) {
          throw std::invalid_argument("mapping: choice for " + cmd + " branch '" + branch + "' must be a string");
        }
        bc[branch] = target.get<std::string>();
      }
    } else {
      throw std::invalid_argument("mapping: entry for '" + cmd + "' must be a string or an object");
    }
    out.emplace(cmd, std::move(bc));
  }
  return out;
}

nlohmann::json write_table(const std::map<std::string, BranchChoice>& table) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [cmd, bc] : table) {
    if (bc.size() == 1 && bc.count("*")) {
      out[cmd] = bc.at("*");
    } else {
      out[cmd] = nlohmann::json(bc);
    }
  }
  return out;
}

}  // namespace

RefinementMapping RefinementMapping::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("mapping: top level must be an object");
  for (const auto& [k, v] : j.items()) {
    (void)v;
    if (k != "new_methods" && k != "actions") throw std::invalid_argument("mapping: unknown key '" + k + "'");
  }
  RefinementMapping m;
  m.mode = MappingMode::Explicit;
  m.new_methods = read_table(j, "new_methods");
  m.actions = read_table(j, "actions");
  return m;
}

RefinementMapping RefinementMapping::parse(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("mapping: ") + e.what());
  }
  return from_json(j);
}

RefinementMapping RefinementMapping::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open mapping file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

nlohmann::json RefinementMapping::to_json() const {
  return {{"new_methods", write_table(new_methods)}, {"actions", write_table(actions)}};
}

const std::string* RefinementMapping::choice(const std::map<std::string, BranchChoice>& table,
                                             const std::string& command, const std::string& branch) const {
  auto it = table.find(command);
  if (it == table.end()) return nullptr;
  auto b = it->second.find(branch);
  if (b == it->second.end()) b = it->second.find("*");
  if (b == it->second.end()) return nullptr;
  return &b->second;
}

}  // namespace northpole::refine
