#include "runtime/class_descriptor.hpp"

#include <set>

namespace northpole::runtime {

namespace {

void validate_body(const ClassDescriptor& cls, const std::string& owner, const std::vector<Segment>& body) {
  for (std::size_t i = 0; i < body.size(); ++i) {
    const auto& seg = body[i];
    if (!seg.update && !seg.call) {
      throw DescriptorError(cls.name + "." + owner + ": segment " + std::to_string(i) + " is empty");
    }
    if (seg.call && seg.call->target_param >= cls.params.size()) {
      throw DescriptorError(cls.name + "." + owner + ": segment " + std::to_string(i) +
                            " calls through undeclared parameter #" + std::to_string(seg.call->target_param));
    }
  }
}

}  // namespace

void ClassDescriptor::validate() const {
  if (name.empty()) throw DescriptorError("class without a name");
  std::set<std::string> seen;
  for (const auto& f : fields) {
    if (!seen.insert(f.name).second) throw DescriptorError(name + ": duplicate field '" + f.name + "'");
    if (!f.domain.contains(f.initial)) {
      throw DescriptorError(name + ": initial value " + std::to_string(f.initial) + " of field '" + f.name +
                            "' is outside " + f.domain.describe());
    }
  }
  std::set<std::string> method_names;
  for (const auto& m : methods) {
    if (!method_names.insert(m.name).second) throw DescriptorError(name + ": duplicate method '" + m.name + "'");
    validate_body(*this, m.name, m.body);
  }
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto& a = actions[i];
    if (a.body.empty()) throw DescriptorError(name + ": action #" + std::to_string(i) + " has an empty body");
    validate_body(*this, a.name.empty() ? "action" + std::to_string(i) : a.name, a.body);
  }
}

std::optional<std::size_t> ClassDescriptor::method_index(std::string_view method) const {
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (methods[i].name == method) return i;
  }
  return std::nullopt;
}

std::size_t ClassDescriptor::field_index(std::string_view field) const {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].name == field) return i;
  }
  throw DescriptorError(name + ": no field '" + std::string(field) + "'");
}

std::vector<Value> ClassDescriptor::initial_values() const {
  std::vector<Value> out;
  out.reserve(fields.size());
  for (const auto& f : fields) out.push_back(f.initial);
  return out;
}

}  // namespace northpole::runtime
