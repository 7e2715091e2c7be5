#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "iakr/core.hpp"

namespace iakr {

enum class ConstraintKind { Key, Independence };

/// A key k(X) or an independence atom X ⊥ Y over schema positions.
/// Independence sides are kept exactly as written; `normalized()` gives the
/// storage orientation (smaller side first under AttrSet::compare).
struct Constraint {
  ConstraintKind kind = ConstraintKind::Key;
  AttrSet lhs;  // key attributes, or the left independence side
  AttrSet rhs;  // right independence side; unused for keys

  static Constraint key(AttrSet x) { return {ConstraintKind::Key, x, AttrSet()}; }
  static Constraint independence(AttrSet x, AttrSet y) {
    return {ConstraintKind::Independence, x, y};
  }

  bool is_key() const { return kind == ConstraintKind::Key; }
  bool is_independence() const { return kind == ConstraintKind::Independence; }

  /// Both sides are single attributes.
  bool is_unary_independence() const {
    return is_independence() && lhs.size() == 1 && rhs.size() == 1;
  }

  /// Every attribute the constraint mentions.
  AttrSet attrs() const { return lhs | rhs; }

  Constraint normalized() const {
    if (is_independence() && AttrSet::compare(rhs, lhs) < 0)
      return independence(rhs, lhs);
    return *this;
  }

  Constraint flipped() const {
    if (!is_independence()) throw ValidationError("cannot flip a key");
    return independence(rhs, lhs);
  }

  static int compare(const Constraint& a, const Constraint& b) {
    if (a.kind != b.kind) return a.is_key() ? -1 : 1;
    if (int c = AttrSet::compare(a.lhs, b.lhs)) return c;
    return AttrSet::compare(a.rhs, b.rhs);
  }
  bool operator==(const Constraint&) const = default;
  bool operator<(const Constraint& o) const { return compare(*this, o) < 0; }

  /// Statement form without the trailing semicolon: `key(A B)` / `ind(A ; B)`.
  std::string format(const Schema& s) const {
    if (is_key()) return "key(" + s.format_set(lhs) + ")";
    return "ind(" + s.format_set(lhs) + " ; " + s.format_set(rhs) + ")";
  }
};

/// A set of constraints over one schema. Independence atoms are stored in
/// normalized orientation, so X⊥Y and Y⊥X occupy one slot.
class ConstraintSet {
public:
  ConstraintSet() = default;
  explicit ConstraintSet(Schema schema) : schema_(std::move(schema)) {}
  ConstraintSet(Schema schema, const std::vector<Constraint>& cs)
      : schema_(std::move(schema)) {
    for (const auto& c : cs) insert(c);
  }

  const Schema& schema() const { return schema_; }

  void insert(const Constraint& c) {
    if (!c.attrs().subset_of(schema_.all()))
      throw ValidationError("constraint mentions attributes outside schema " + schema_.name());
    set_.insert(c.normalized());
  }

  /// Membership up to independence symmetry.
  bool contains(const Constraint& c) const { return set_.count(c.normalized()) > 0; }

  /// Membership in exactly the stored orientation (no symmetry applied).
  bool contains_literal(const Constraint& c) const { return set_.count(c) > 0; }

  std::size_t size() const { return set_.size(); }
  bool empty() const { return set_.empty(); }
  auto begin() const { return set_.begin(); }
  auto end() const { return set_.end(); }

  std::vector<Constraint> keys() const {
    std::vector<Constraint> out;
    for (const auto& c : set_)
      if (c.is_key()) out.push_back(c);
    return out;
  }

  std::vector<Constraint> independences() const {
    std::vector<Constraint> out;
    for (const auto& c : set_)
      if (c.is_independence()) out.push_back(c);
    return out;
  }

  /// Constraints whose attributes all lie in `attrs`.
  ConstraintSet restricted_to(AttrSet attrs) const {
    ConstraintSet out(schema_);
    for (const auto& c : set_)
      if (c.attrs().subset_of(attrs)) out.set_.insert(c);
    return out;
  }

  ConstraintSet without(const Constraint& c) const {
    ConstraintSet out(schema_);
    for (const auto& d : set_)
      if (!(d == c.normalized())) out.set_.insert(d);
    return out;
  }

  bool operator==(const ConstraintSet&) const = default;

private:
  Schema schema_;
  std::set<Constraint> set_;
};

}  // namespace iakr
