#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "iakr/constraint.hpp"
#include "iakr/core.hpp"
#include "iakr/relation.hpp"

namespace iakr {

enum class Verdict { Holds, Violated };

/// Outcome of checking one constraint against a relation. For a violated
/// key, the witness rows are the earliest pair (in row order) agreeing on
/// the key. For a violated independence atom ind(X ; Y), the witness rows
/// realize the lexicographically least (X, Y)-value pair that no single row
/// combines.
struct CheckResult {
  Verdict verdict = Verdict::Holds;
  std::optional<std::array<std::size_t, 2>> witness;
  bool holds() const { return verdict == Verdict::Holds; }
};

struct ReportEntry {
  Constraint constraint;
  CheckResult result;
};

struct SatisfactionReport {
  std::vector<ReportEntry> entries;
  bool all_hold = true;
};

namespace detail {

// Rows grouped by their projection onto `cols`: row indices sorted by
// (projection, row index), the per-row class rank in projection order, and
// each class's earliest row.
struct ProjectionClasses {
  std::vector<std::uint32_t> order;
  std::vector<std::uint32_t> rank;
  std::vector<std::uint32_t> reps;
};

inline int compare_projection(const Relation& r, const std::vector<int>& cols,
                              std::uint32_t a, std::uint32_t b) {
  for (int c : cols) {
    Value va = r.value(a, c), vb = r.value(b, c);
    if (va != vb) return va < vb ? -1 : 1;
  }
  return 0;
}

inline ProjectionClasses projection_classes(const Relation& r, const std::vector<int>& cols) {
  ProjectionClasses pc;
  std::size_t n = r.size();
  pc.order.resize(n);
  for (std::size_t t = 0; t < n; ++t) pc.order[t] = static_cast<std::uint32_t>(t);
  std::sort(pc.order.begin(), pc.order.end(), [&](std::uint32_t a, std::uint32_t b) {
    int c = compare_projection(r, cols, a, b);
    return c != 0 ? c < 0 : a < b;
  });
  pc.rank.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || compare_projection(r, cols, pc.order[i - 1], pc.order[i]) != 0)
      pc.reps.push_back(pc.order[i]);
    pc.rank[pc.order[i]] = static_cast<std::uint32_t>(pc.reps.size() - 1);
  }
  return pc;
}

}  // namespace detail

/// key(X): no two distinct tuples agree on every attribute of X.
inline CheckResult satisfies_key(const Relation& r, AttrSet x) {
  auto cols = x.indices();
  auto pc = detail::projection_classes(r, cols);
  std::optional<std::array<std::size_t, 2>> best;
  std::size_t i = 0, n = r.size();
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && detail::compare_projection(r, cols, pc.order[i], pc.order[j]) == 0) ++j;
    if (j - i >= 2) {
      std::array<std::size_t, 2> cand = {pc.order[i], pc.order[i + 1]};
      if (!best || cand[1] < (*best)[1]) best = cand;
    }
    i = j;
  }
  if (best) return {Verdict::Violated, best};
  return {};
}

/// ind(X ; Y): for all tuples t, t' there is a tuple agreeing with t on X
/// and with t' on Y. Equivalently |r(XY)| = |r(X)| * |r(Y)|.
inline CheckResult satisfies_ia(const Relation& r, AttrSet x, AttrSet y) {
  if (r.size() == 0) return {};
  auto px = detail::projection_classes(r, x.indices());
  auto py = detail::projection_classes(r, y.indices());
  std::size_t cx = px.reps.size(), cy = py.reps.size();

  std::vector<std::uint64_t> codes(r.size());
  for (std::size_t t = 0; t < r.size(); ++t)
    codes[t] = (static_cast<std::uint64_t>(px.rank[t]) << 32) | py.rank[t];
  std::sort(codes.begin(), codes.end());
  std::size_t cxy = std::unique(codes.begin(), codes.end()) - codes.begin();
  codes.resize(cxy);
  if (cxy == cx * cy) return {};

  // Some (X, Y) combination is missing; scanning the product in order finds
  // the least one within |r(XY)| + 1 probes.
  std::unordered_set<std::uint64_t> present(codes.begin(), codes.end());
  for (std::size_t i = 0; i < cx; ++i)
    for (std::size_t j = 0; j < cy; ++j) {
      std::uint64_t code = (static_cast<std::uint64_t>(i) << 32) | j;
      if (!present.count(code))
        return {Verdict::Violated, std::array<std::size_t, 2>{px.reps[i], py.reps[j]}};
    }
  throw InternalError("independence cardinality shortfall without a missing pair");
}

inline CheckResult satisfies(const Relation& r, const Constraint& c) {
  return c.is_key() ? satisfies_key(r, c.lhs) : satisfies_ia(r, c.lhs, c.rhs);
}

inline bool holds(const Relation& r, const Constraint& c) { return satisfies(r, c).holds(); }

/// Checks every constraint, in canonical order.
inline SatisfactionReport satisfies_all(const Relation& r, const ConstraintSet& cs) {
  if (!(r.schema() == cs.schema()))
    throw ValidationError("relation and constraints use different schemas");
  SatisfactionReport rep;
  for (const auto& c : cs) {
    rep.entries.push_back({c, satisfies(r, c)});
    rep.all_hold = rep.all_hold && rep.entries.back().result.holds();
  }
  return rep;
}

/// Drops every constraint mentioning an attribute outside `keep`.
inline ConstraintSet restrict_constraints(const ConstraintSet& cs, AttrSet keep) {
  return cs.restricted_to(keep);
}

}  // namespace iakr
