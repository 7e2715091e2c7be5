#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "iakr/constraint.hpp"
#include "iakr/core.hpp"
#include "iakr/decision.hpp"
#include "iakr/relation.hpp"
#include "iakr/semantics.hpp"

namespace iakr {

/// Joint verdict for a claimed countermodel: every constraint of Σ holds and
/// the target fails.
struct CountermodelCheck {
  SatisfactionReport constraints;
  CheckResult target_result;
  bool ok = false;
};

inline CountermodelCheck verify_countermodel(const Relation& r, const ConstraintSet& sigma,
                                             const Constraint& target) {
  CountermodelCheck out;
  out.constraints = satisfies_all(r, sigma);
  out.target_result = satisfies(r, target);
  out.ok = out.constraints.all_hold && !out.target_result.holds();
  return out;
}

/// A finite prefix of the infinite chase. Rounds cycle through the schedule
/// of independence atoms; round n completes the scheduled atom's value-pair
/// product with fresh tuples. Every prefix satisfies the hypothesis keys and
/// keeps the target violation alive; the scheduled atom holds right after
/// its round.
class ChasePrefix {
public:
  /// How non-scheduled, non-constant columns of a repair tuple are filled.
  /// Indexed: value m + i*M + j for the i-th new tuple at 1-based column j.
  /// Sequential: consecutive fresh values m+1, m+2, ... column-major per
  /// tuple. Both stay above the pre-round maximum m.
  enum class FreshPolicy { Indexed, Sequential };

  const Relation& relation() const { return rel_; }
  const ConstraintSet& sigma() const { return sigma_; }
  const Constraint& target() const { return target_; }
  AttrSet constant_set() const { return constant_; }
  const std::vector<Constraint>& schedule() const { return schedule_; }
  const std::vector<std::vector<Value>>& seed_rows() const { return seed_; }
  int rounds_done() const { return rounds_; }
  Value max_value() const { return max_; }

  /// Index into schedule() used by the next round.
  std::size_t next_scheduled() const { return schedule_.empty() ? 0 : rounds_ % schedule_.size(); }

  void advance(int rounds) {
    if (rounds < 0) throw ValidationError("round count must be non-negative");
    for (int k = 0; k < rounds; ++k) {
      if (!schedule_.empty()) run_round(schedule_[rounds_ % schedule_.size()]);
      ++rounds_;
    }
  }

  /// Re-checks the construction's guarantees; throws InternalError if any
  /// fails.
  void verify() const {
    for (const auto& c : sigma_)
      if (c.is_key() && !satisfies_key(rel_, c.lhs).holds())
        throw InternalError("chase prefix violates " + c.format(rel_.schema()));
    for (int j : constant_.indices())
      for (std::size_t t = 0; t < rel_.size(); ++t)
        if (rel_.value(t, j) != 0)
          throw InternalError("constant column " + rel_.schema().attr_name(j) + " is not zero");
    if (target_.is_key()) {
      for (int j : target_.lhs.indices())
        if (rel_.value(0, j) != rel_.value(1, j))
          throw InternalError("seed rows no longer agree on the target key");
    } else {
      int cx = target_.lhs.front(), cy = target_.rhs.front();
      Value vx = seed_[0][cx], vy = seed_[1][cy];
      for (std::size_t t = 0; t < rel_.size(); ++t)
        if (rel_.value(t, cx) == vx && rel_.value(t, cy) == vy)
          throw InternalError("target independence pair is no longer missing");
      if (satisfies_ia(rel_, target_.lhs, target_.rhs).holds())
        throw InternalError("target independence atom holds in the prefix");
    }
    if (rounds_ >= 1 && !schedule_.empty()) {
      const Constraint& atom = schedule_[(rounds_ - 1) % schedule_.size()];
      if (!satisfies_ia(rel_, atom.lhs, atom.rhs).holds())
        throw InternalError("scheduled atom does not hold after its round: " +
                            atom.format(rel_.schema()));
    }
  }

private:
  friend ChasePrefix theorem2_prefix(const ConstraintSet&, const Constraint&, int);
  friend ChasePrefix lemma2_chain(int);

  void run_round(const Constraint& atom) {
    int cx = atom.lhs.front(), cy = atom.rhs.front();
    auto ranks_of = [&](int col) {
      std::vector<Value> vals(rel_.size());
      for (std::size_t t = 0; t < rel_.size(); ++t) vals[t] = rel_.value(t, col);
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      return vals;
    };
    std::vector<Value> xs = ranks_of(cx), ys = ranks_of(cy);
    if (xs.size() * ys.size() > std::size_t{1} << 30)
      throw ValidationError("chase prefix would exceed the supported size; use fewer rounds");
    auto rank = [](const std::vector<Value>& vs, Value v) {
      return static_cast<std::uint64_t>(std::lower_bound(vs.begin(), vs.end(), v) - vs.begin());
    };
    std::unordered_set<std::uint64_t> present;
    present.reserve(rel_.size() * 2);
    for (std::size_t t = 0; t < rel_.size(); ++t)
      present.insert((rank(xs, rel_.value(t, cx)) << 32) | rank(ys, rel_.value(t, cy)));

    std::size_t missing = xs.size() * ys.size() - present.size();
    if (missing == 0) return;
    if (cx == cy || constant_.contains(cx) || constant_.contains(cy))
      throw InternalError("scheduled atom over a constant or degenerate column has gaps");

    int width = rel_.width();
    int free_cols = 0;
    for (int j = 0; j < width; ++j)
      if (j != cx && j != cy && !constant_.contains(j)) ++free_cols;

    Value m = max_;
    rel_.reserve_rows(rel_.size() + missing);
    std::vector<Value> row(width);
    std::int64_t i = 0;
    for (std::size_t p = 0; p < xs.size(); ++p)
      for (std::size_t q = 0; q < ys.size(); ++q) {
        if (present.count((static_cast<std::uint64_t>(p) << 32) | q)) continue;
        ++i;
        int seq = 0;
        for (int j = 0; j < width; ++j) {
          if (j == cx) row[j] = xs[p];
          else if (j == cy) row[j] = ys[q];
          else if (constant_.contains(j)) row[j] = 0;
          else if (policy_ == FreshPolicy::Indexed) row[j] = m + i * width + (j + 1);
          else row[j] = m + (i - 1) * free_cols + (++seq);
        }
        rel_.append_row(row);
        for (int j = 0; j < width; ++j) max_ = std::max(max_, row[j]);
      }
  }

  Relation rel_;
  ConstraintSet sigma_;
  Constraint target_ = Constraint::key(AttrSet());
  AttrSet constant_;
  std::vector<Constraint> schedule_;
  std::vector<std::vector<Value>> seed_;
  int rounds_ = 0;
  Value max_ = 0;
  FreshPolicy policy_ = FreshPolicy::Indexed;
};

/// The standard countermodel prefix for a non-implied admissible constraint:
/// two seed tuples separated outside the constant/target attributes, then
/// `rounds` chase rounds (default: three full passes over the schedule).
/// Throws ValidationError if Σ implies the target.
inline ChasePrefix theorem2_prefix(const ConstraintSet& sigma, const Constraint& phi,
                                   int rounds = -1) {
  ImplicationAnswer ans = implies_general(sigma, phi);
  if (ans.implied)
    throw ValidationError("constraint is implied; no countermodel exists");

  ChasePrefix p;
  p.sigma_ = sigma;
  p.target_ = phi;
  p.constant_ = constant_attributes(sigma);
  for (const auto& c : sigma)
    if (c.is_independence() && !c.lhs.empty() && !c.rhs.empty()) p.schedule_.push_back(c);

  const Schema& s = sigma.schema();
  int width = s.width();
  AttrSet zero = phi.is_key() ? (p.constant_ | phi.lhs) : p.constant_;
  if (zero == s.all()) throw InternalError("separating seed tuples do not exist");
  std::vector<Value> t0(width), t1(width);
  for (int j = 0; j < width; ++j) {
    t0[j] = zero.contains(j) ? 0 : j + 1;
    t1[j] = zero.contains(j) ? 0 : width + j + 1;
  }
  p.rel_ = Relation(s);
  p.rel_.append_row(t0);
  p.rel_.append_row(t1);
  p.seed_ = {t0, t1};
  for (Value v : t1) p.max_ = std::max(p.max_, v);
  for (Value v : t0) p.max_ = std::max(p.max_, v);

  p.advance(rounds < 0 ? 3 * static_cast<int>(p.schedule_.size()) : rounds);
  p.verify();
  return p;
}

/// Alternating chase chain over the two-block cyclic hypothesis set: seed
/// {(0,0,1,2),(0,0,3,4)} is depth 1; each further round completes the next
/// atom in the alternation ind(A1 ; B1), ind(A2 ; B2) with pairwise fresh
/// values in the other two columns. key(A1 B1) fails at every depth.
inline ChasePrefix lemma2_chain(int depth) {
  if (depth < 1) throw ValidationError("chain depth must be at least 1");
  Schema s("R2", {"A1", "B1", "A2", "B2"});
  AttrSet a1 = AttrSet::single(0), b1 = AttrSet::single(1);
  AttrSet a2 = AttrSet::single(2), b2 = AttrSet::single(3);
  ConstraintSet sigma(s);
  sigma.insert(Constraint::independence(a1, b1));
  sigma.insert(Constraint::independence(a2, b2));
  sigma.insert(Constraint::key(b1 | a2));
  sigma.insert(Constraint::key(b2 | a1));

  ChasePrefix p;
  p.sigma_ = sigma;
  p.target_ = Constraint::key(a1 | b1);
  p.schedule_ = {Constraint::independence(a1, b1), Constraint::independence(a2, b2)};
  p.policy_ = ChasePrefix::FreshPolicy::Sequential;
  p.rel_ = Relation(s);
  p.rel_.append_row({0, 0, 1, 2});
  p.rel_.append_row({0, 0, 3, 4});
  p.seed_ = {{0, 0, 1, 2}, {0, 0, 3, 4}};
  p.max_ = 4;
  p.rounds_ = 1;  // the seed already satisfies ind(A1 ; B1)

  p.advance(depth - 1);
  p.verify();
  return p;
}

}  // namespace iakr
