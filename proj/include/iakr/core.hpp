#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace iakr {

/// Malformed input text (constraint DSL, CSV, query strings).
struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(std::string msg, int line_ = 0, int col_ = 0)
      : std::runtime_error(line_ > 0 ? std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg
                                     : msg),
        line(line_), col(col_) {}
};

/// Structurally valid input that violates an operation's precondition.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A guaranteed invariant failed; indicates a defect, not bad input.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Attribute values are opaque atoms compared by identity. Relations loaded
/// from text keep a per-relation dictionary mapping ids back to spellings;
/// generated relations use non-negative integers directly.
using Value = std::int64_t;

/// Subset of a schema's attributes, encoded as a bitmask over attribute
/// positions. Position 0 is the first declared attribute.
class AttrSet {
public:
  constexpr AttrSet() = default;
  constexpr explicit AttrSet(std::uint32_t bits) : bits_(bits) {}

  static constexpr AttrSet single(int i) { return AttrSet(std::uint32_t{1} << i); }
  static constexpr AttrSet from_bits(std::uint32_t bits) { return AttrSet(bits); }
  static constexpr AttrSet first_n(int n) {
    return AttrSet(n >= 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << n) - 1);
  }

  constexpr bool contains(int i) const { return (bits_ >> i) & 1u; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr std::uint32_t bits() const { return bits_; }

  constexpr AttrSet operator|(AttrSet o) const { return AttrSet(bits_ | o.bits_); }
  constexpr AttrSet operator&(AttrSet o) const { return AttrSet(bits_ & o.bits_); }
  constexpr AttrSet operator-(AttrSet o) const { return AttrSet(bits_ & ~o.bits_); }
  constexpr AttrSet& operator|=(AttrSet o) { bits_ |= o.bits_; return *this; }
  constexpr bool operator==(const AttrSet&) const = default;

  constexpr bool subset_of(AttrSet o) const { return (bits_ & ~o.bits_) == 0; }

  /// Lowest member position; set must be nonempty.
  constexpr int front() const { return std::countr_zero(bits_); }

  std::vector<int> indices() const {
    std::vector<int> out;
    for (std::uint32_t b = bits_; b; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  /// Canonical total order: lexicographic on the ascending index sequences,
  /// so {} < {0} < {0,1} < {1}.
  static int compare(AttrSet a, AttrSet b) {
    std::uint32_t x = a.bits_, y = b.bits_;
    while (x && y) {
      int i = std::countr_zero(x), j = std::countr_zero(y);
      if (i != j) return i < j ? -1 : 1;
      x &= x - 1;
      y &= y - 1;
    }
    if (x) return 1;
    if (y) return -1;
    return 0;
  }

private:
  std::uint32_t bits_ = 0;
};

/// Relation schema: a name plus an ordered list of distinct attribute names.
class Schema {
public:
  Schema() = default;
  Schema(std::string name, std::vector<std::string> attrs)
      : name_(std::move(name)), attrs_(std::move(attrs)) {
    if (attrs_.size() > kMaxAttrs)
      throw ValidationError("schema exceeds " + std::to_string(kMaxAttrs) + " attributes");
    for (std::size_t i = 0; i < attrs_.size(); ++i)
      for (std::size_t j = i + 1; j < attrs_.size(); ++j)
        if (attrs_[i] == attrs_[j])
          throw ValidationError("duplicate attribute '" + attrs_[i] + "' in schema " + name_);
  }

  static constexpr std::size_t kMaxAttrs = 32;

  const std::string& name() const { return name_; }
  const std::vector<std::string>& attrs() const { return attrs_; }
  int width() const { return static_cast<int>(attrs_.size()); }
  const std::string& attr_name(int i) const { return attrs_.at(i); }
  AttrSet all() const { return AttrSet::first_n(width()); }

  /// Position of a named attribute, or -1.
  int find(const std::string& name) const {
    for (int i = 0; i < width(); ++i)
      if (attrs_[i] == name) return i;
    return -1;
  }

  int require(const std::string& name) const {
    int i = find(name);
    if (i < 0) throw ValidationError("unknown attribute '" + name + "' in schema " + name_);
    return i;
  }

  AttrSet set_of(const std::vector<std::string>& names) const {
    AttrSet s;
    for (const auto& n : names) s |= AttrSet::single(require(n));
    return s;
  }

  std::vector<std::string> names_of(AttrSet s) const {
    std::vector<std::string> out;
    for (int i : s.indices()) out.push_back(attr_name(i));
    return out;
  }

  /// Attribute names joined by single spaces, in declaration order.
  std::string format_set(AttrSet s) const {
    std::string out;
    for (int i : s.indices()) {
      if (!out.empty()) out += ' ';
      out += attr_name(i);
    }
    return out;
  }

  bool operator==(const Schema&) const = default;

private:
  std::string name_;
  std::vector<std::string> attrs_;
};

}  // namespace iakr
