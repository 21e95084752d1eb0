#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace northpole {

using Value = std::int64_t;

// Value set of a field. Enumeration values are stored as label indices,
// booleans as 0/1.
class Domain {
 public:
  enum class Kind { Enumeration, Range, Boolean, Unbounded };

  static Domain enumeration(std::vector<std::string> labels);
  static Domain range(Value lo, Value hi);
  static Domain boolean();
  static Domain unbounded();

  Kind kind() const { return kind_; }
  bool finite() const { return kind_ != Kind::Unbounded; }
  bool contains(Value v) const;

  // Number of values; only meaningful when finite().
  std::size_t size() const;
  // i-th value in canonical order (labels in declaration order, ints ascending).
  Value at(std::size_t i) const;
  // Inverse of at(); nullopt when v is outside the domain.
  std::optional<std::size_t> index_of(Value v) const;

  Value lo() const { return lo_; }
  Value hi() const { return hi_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<Value> label_value(const std::string& label) const;

  std::string describe() const;
  std::string format(Value v) const;

  bool operator==(const Domain&) const = default;

 private:
  Domain() = default;

  Kind kind_ = Kind::Unbounded;
  Value lo_ = 0;
  Value hi_ = 0;
  std::vector<std::string> labels_;
};

}  // namespace northpole
