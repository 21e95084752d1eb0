#include "common/domain.hpp"

#include <algorithm>
#include <stdexcept>

namespace northpole {

Domain Domain::enumeration(std::vector<std::string> labels) {
  if (labels.empty()) throw std::invalid_argument("enumeration domain needs at least one label");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      if (labels[i] == labels[j]) throw std::invalid_argument("duplicate label '" + labels[i] + "'");
    }
  }
  Domain d;
  d.kind_ = Kind::Enumeration;
  d.lo_ = 0;
  d.hi_ = static_cast<Value>(labels.size()) - 1;
  d.labels_ = std::move(labels);
  return d;
}

Domain Domain::range(Value lo, Value hi) {
  if (lo > hi) throw std::invalid_argument("empty range " + std::to_string(lo) + " .. " + std::to_string(hi));
  Domain d;
  d.kind_ = Kind::Range;
  d.lo_ = lo;
  d.hi_ = hi;
  return d;
}

Domain Domain::boolean() {
  Domain d;
  d.kind_ = Kind::Boolean;
  d.lo_ = 0;
  d.hi_ = 1;
  return d;
}

Domain Domain::unbounded() { return Domain{}; }

bool Domain::contains(Value v) const {
  if (kind_ == Kind::Unbounded) return true;
  return v >= lo_ && v <= hi_;
}

std::size_t Domain::size() const {
  if (kind_ == Kind::Unbounded) throw std::logic_error("size() of an unbounded domain");
  return static_cast<std::size_t>(hi_ - lo_ + 1);
}

Value Domain::at(std::size_t i) const { return lo_ + static_cast<Value>(i); }

std::optional<std::size_t> Domain::index_of(Value v) const {
  if (!finite() || !contains(v)) return std::nullopt;
  return static_cast<std::size_t>(v - lo_);
}

std::optional<Value> Domain::label_value(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<Value>(it - labels_.begin());
}

std::string Domain::describe() const {
  switch (kind_) {
    case Kind::Enumeration: {
      std::string out = "{";
      for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (i) out += ", ";
        out += labels_[i];
      }
      return out + "}";
    }
    case Kind::Range:
      return std::to_string(lo_) + " .. " + std::to_string(hi_);
    case Kind::Boolean:
      return "boolean";
    case Kind::Unbounded:
      return "int";
  }
  return "?";
}

std::string Domain::format(Value v) const {
  switch (kind_) {
    case Kind::Enumeration:
      if (contains(v)) return labels_[static_cast<std::size_t>(v)];
      return "<label " + std::to_string(v) + ">";
    case Kind::Boolean:
      if (v == 0) return "false";
      if (v == 1) return "true";
      return "<bool " + std::to_string(v) + ">";
    default:
      return std::to_string(v);
  }
}

}  // namespace northpole
