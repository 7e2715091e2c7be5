#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "iakr/core.hpp"

namespace iakr {

/// Finite relation over a schema. Rows are stored flat in insertion order and
/// form a set: construction sites guarantee distinctness (text loaders dedupe,
/// generators emit provably distinct rows).
///
/// Values are plain integers. A relation ingested from text carries a
/// dictionary assigning each distinct input spelling an id in first-occurrence
/// order; generated relations have no dictionary and display values in
/// decimal. Not thread-safe while rows are being added; safe to share after.
class Relation {
public:
  Relation() = default;
  explicit Relation(Schema schema) : schema_(std::move(schema)) {}

  const Schema& schema() const { return schema_; }
  int width() const { return schema_.width(); }
  std::size_t size() const { return data_.size() / (width() ? width() : 1); }
  bool empty() const { return data_.empty(); }

  Value value(std::size_t row, int col) const { return data_[row * width() + col]; }
  std::span<const Value> row(std::size_t r) const {
    return {data_.data() + r * width(), static_cast<std::size_t>(width())};
  }

  /// Appends a row; the caller guarantees it differs from every stored row.
  void append_row(std::span<const Value> vals) {
    if (static_cast<int>(vals.size()) != width())
      throw ValidationError("row width does not match schema " + schema_.name());
    data_.insert(data_.end(), vals.begin(), vals.end());
  }
  void append_row(std::initializer_list<Value> vals) {
    append_row(std::span<const Value>(vals.begin(), vals.size()));
  }

  void reserve_rows(std::size_t n) { data_.reserve(n * width()); }

  /// Id for a spelling, interning it on first sight.
  Value intern(const std::string& spelling) {
    auto it = dict_index_.find(spelling);
    if (it != dict_index_.end()) return it->second;
    Value id = static_cast<Value>(dict_.size());
    dict_.push_back(spelling);
    dict_index_.emplace(spelling, id);
    return id;
  }

  bool has_dictionary() const { return !dict_.empty(); }

  std::string display(Value v) const {
    if (dict_.empty()) return std::to_string(v);
    if (v < 0 || static_cast<std::size_t>(v) >= dict_.size())
      throw InternalError("value id outside dictionary");
    return dict_[static_cast<std::size_t>(v)];
  }

  std::vector<Value> row_copy(std::size_t r) const {
    auto s = row(r);
    return {s.begin(), s.end()};
  }

  /// Rows rendered through the dictionary; the representation-independent view.
  std::vector<std::vector<std::string>> displayed_rows() const {
    std::vector<std::vector<std::string>> out;
    out.reserve(size());
    for (std::size_t r = 0; r < size(); ++r) {
      std::vector<std::string> t;
      t.reserve(width());
      for (int c = 0; c < width(); ++c) t.push_back(display(value(r, c)));
      out.push_back(std::move(t));
    }
    return out;
  }

  /// Set equality of displayed rows over equal schemas.
  bool same_contents(const Relation& o) const {
    if (schema_ != o.schema_ || size() != o.size()) return false;
    auto a = displayed_rows(), b = o.displayed_rows();
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
  }

  /// Copy carrying the schema and dictionary but no rows.
  Relation without_rows() const {
    Relation out(*this);
    out.data_.clear();
    return out;
  }

private:
  Schema schema_;
  std::vector<Value> data_;
  std::vector<std::string> dict_;
  std::unordered_map<std::string, Value> dict_index_;
};

/// Distinct projections of `r` onto `attrs`, sorted. Projecting a nonempty
/// relation onto the empty set yields one empty tuple.
inline std::vector<std::vector<Value>> project(const Relation& r, AttrSet attrs) {
  auto cols = attrs.indices();
  std::vector<std::vector<Value>> out;
  out.reserve(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    std::vector<Value> t;
    t.reserve(cols.size());
    for (int c : cols) t.push_back(r.value(i, c));
    out.push_back(std::move(t));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Rows of `r` whose value at `col` equals `v`, as a relation.
inline Relation select_eq(const Relation& r, int col, Value v) {
  if (col < 0 || col >= r.width()) throw ValidationError("selection column out of range");
  Relation out = r.without_rows();
  for (std::size_t i = 0; i < r.size(); ++i)
    if (r.value(i, col) == v) out.append_row(r.row(i));
  return out;
}

}  // namespace iakr
