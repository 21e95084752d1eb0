#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "common/domain.hpp"

namespace northpole::trace {
class EventSink;
}

namespace northpole::runtime {

using ObjectId = std::uint64_t;
inline constexpr ObjectId kExternalOrigin = ~ObjectId{0};

class DescriptorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mutable view handed to a segment while it holds its object's exclusion.
class SegmentContext {
 public:
  SegmentContext(std::span<Value> fields, std::span<const Value> args, ObjectId self, ObjectId origin,
                 trace::EventSink* sink)
      : fields_(fields), args_(args), self_(self), origin_(origin), sink_(sink) {}

  Value& operator[](std::size_t field) { return fields_[field]; }
  Value get(std::size_t field) const { return fields_[field]; }
  std::span<const Value> fields() const { return fields_; }
  std::span<const Value> args() const { return args_; }

  ObjectId self() const { return self_; }
  // Object whose action started the running task, or kExternalOrigin.
  ObjectId origin() const { return origin_; }
  trace::EventSink* sink() const { return sink_; }

 private:
  std::span<Value> fields_;
  std::span<const Value> args_;
  ObjectId self_;
  ObjectId origin_;
  trace::EventSink* sink_;
};

using Guard = std::function<bool(std::span<const Value> fields)>;
// Applies the segment's field updates; returns true when the segment's
// outgoing call (if it declares one) should be made.
using SegmentUpdate = std::function<bool(SegmentContext&)>;
using CallArgs = std::function<std::vector<Value>(const SegmentContext&)>;

struct CallSite {
  std::size_t target_param = 0;  // index into ClassDescriptor::params
  std::string method;
  CallArgs args;  // empty for zero-argument methods
};

// A maximal call-free stretch of a body: updates, then at most one call.
struct Segment {
  SegmentUpdate update;  // empty: no updates, call unconditionally
  std::optional<CallSite> call{};
};

struct FieldSpec {
  std::string name;
  Domain domain;
  Value initial = 0;
};

struct MethodDescriptor {
  std::string name;
  std::size_t arity = 0;
  Guard guard;  // empty: always true
  std::vector<Segment> body;
};

struct ActionDescriptor {
  std::string name;
  Guard guard;
  std::vector<Segment> body;
};

struct ClassDescriptor {
  std::string name;
  std::vector<FieldSpec> fields;
  // Constructor parameters: references to other objects, used as call targets.
  std::vector<std::string> params;
  std::vector<MethodDescriptor> methods;
  std::vector<ActionDescriptor> actions;

  // Throws DescriptorError on malformed descriptors: duplicate names,
  // initial values outside their domain, call sites naming a missing
  // constructor parameter.
  void validate() const;

  std::optional<std::size_t> method_index(std::string_view method) const;
  std::size_t field_index(std::string_view field) const;
  std::vector<Value> initial_values() const;
};

}  // namespace northpole::runtime
