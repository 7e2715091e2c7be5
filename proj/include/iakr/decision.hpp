#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iakr/constraint.hpp"
#include "iakr/core.hpp"
#include "iakr/derivation.hpp"

namespace iakr {

// Implication for keys and single-attribute independence atoms. Over this
// fragment, implication (finite and unrestricted coincide) reduces to the
// fixpoint of "constant" attributes below; see constant_attributes.

namespace detail {

/// Why an attribute entered the constant set. Records enough to rebuild a
/// derivation of ind(a ; a); every referenced attribute entered earlier.
struct Justification {
  enum Kind { Hypothesis, ViaKey, AllKey } kind = Hypothesis;
  Constraint ia = Constraint::key(AttrSet());  // ViaKey: stored atom linking via<->attr
  int via = -1;                                // ViaKey: previously constant attribute
  AttrSet key_attrs;                           // ViaKey/AllKey: chosen key C
  bool key_trivial = false;                    // C is the whole schema (no hypothesis)
  AttrSet strip;                               // constant part of C stripped via R8
};

struct ConstantAnalysis {
  AttrSet constant;
  std::vector<Justification> just;  // indexed by attribute position
};

inline bool admissible_atom(const Constraint& c) {
  return c.is_key() || (c.lhs.size() <= 1 && c.rhs.size() <= 1);
}

inline void require_admissible(const ConstraintSet& cs) {
  for (const auto& c : cs)
    if (!admissible_atom(c))
      throw ValidationError("implication testing needs single-attribute independence sides; " +
                            c.format(cs.schema()) + " is wider");
}

/// First key candidate key(C) (hypotheses in canonical order, then the
/// trivial whole-schema key) with C minus `constant` contained in `allowed`.
inline std::optional<std::pair<AttrSet, bool>> derivable_key(const ConstraintSet& cs,
                                                             AttrSet constant, AttrSet allowed) {
  for (const auto& c : cs) {
    if (!c.is_key()) break;  // keys sort first
    if ((c.lhs - constant).subset_of(allowed)) return std::make_pair(c.lhs, false);
  }
  AttrSet all = cs.schema().all();
  if ((all - constant).subset_of(allowed)) return std::make_pair(all, true);
  return std::nullopt;
}

inline ConstantAnalysis analyze_constants(const ConstraintSet& cs) {
  require_admissible(cs);
  ConstantAnalysis an;
  an.just.resize(cs.schema().width());

  auto add = [&](int a, Justification j) {
    an.constant |= AttrSet::single(a);
    an.just[a] = std::move(j);
  };

  for (const auto& c : cs)
    if (c.is_independence() && c.lhs.size() == 1 && c.lhs == c.rhs)
      add(c.lhs.front(), {Justification::Hypothesis, c, -1, AttrSet(), false, AttrSet()});

  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& c : cs) {
      if (!c.is_independence() || c.lhs.empty() || c.rhs.empty()) continue;
      int a = c.lhs.front(), b = c.rhs.front();
      if (a == b) continue;
      if (!an.constant.contains(b)) {
        if (auto kd = derivable_key(cs, an.constant, AttrSet::single(a))) {
          add(b, {Justification::ViaKey, c, a, kd->first, kd->second,
                  kd->first - AttrSet::single(a)});
          changed = true;
        }
      }
      if (!an.constant.contains(a)) {
        if (auto kd = derivable_key(cs, an.constant, AttrSet::single(b))) {
          add(a, {Justification::ViaKey, c, b, kd->first, kd->second,
                  kd->first - AttrSet::single(b)});
          changed = true;
        }
      }
    }
    if (!(an.constant == cs.schema().all())) {
      if (auto kd = derivable_key(cs, an.constant, AttrSet())) {
        for (int a : (cs.schema().all() - an.constant).indices())
          add(a, {Justification::AllKey, Constraint::key(AttrSet()), -1, kd->first, kd->second,
                  kd->first});
        changed = true;
      }
    }
  }
  return an;
}

/// Builds derivations for facts about the constant set.
class ConstancyProofs {
public:
  ConstancyProofs(const ConstraintSet& cs, const ConstantAnalysis& an) : cs_(cs), an_(an) {}

  /// ind(a ; a) for a constant attribute.
  ProofTree attr(int a) {
    auto it = attr_memo_.find(a);
    if (it != attr_memo_.end()) return it->second;
    const Justification& j = an_.just[a];
    AttrSet sa = AttrSet::single(a);
    ProofTree t;
    switch (j.kind) {
      case Justification::Hypothesis:
        t = hyp(j.ia);
        break;
      case Justification::ViaKey: {
        AttrSet sv = AttrSet::single(j.via);
        ProofTree p_ia = oriented(j.ia, sv, sa);
        ProofTree p_key = key_from(j.key_attrs, j.key_trivial, j.strip, sv);
        t = step(RuleId::R9, {sv, sa, std::nullopt}, {std::move(p_ia), std::move(p_key)},
                 Constraint::independence(sa, sa));
        break;
      }
      case Justification::AllKey: {
        ProofTree p_key = key_from(j.key_attrs, j.key_trivial, j.strip, AttrSet());
        ProofTree p_r1 = step(RuleId::R1, {sa, std::nullopt, std::nullopt}, {},
                              Constraint::independence(AttrSet(), sa));
        t = step(RuleId::R9, {AttrSet(), sa, std::nullopt}, {std::move(p_r1), std::move(p_key)},
                 Constraint::independence(sa, sa));
        break;
      }
    }
    attr_memo_.emplace(a, t);
    return t;
  }

  /// ind(S ; S) for S within the constant set (S may be empty).
  ProofTree set(AttrSet s) {
    auto it = set_memo_.find(s.bits());
    if (it != set_memo_.end()) return it->second;
    ProofTree t;
    if (s.empty()) {
      t = step(RuleId::R1, {AttrSet(), std::nullopt, std::nullopt}, {},
               Constraint::independence(AttrSet(), AttrSet()));
    } else {
      auto idx = s.indices();
      AttrSet acc = AttrSet::single(idx[0]);
      t = attr(idx[0]);
      for (std::size_t i = 1; i < idx.size(); ++i) {
        AttrSet sa = AttrSet::single(idx[i]);
        AttrSet nxt = acc | sa;
        ProofTree join = step(RuleId::R3, {sa, acc, acc}, {attr(idx[i]), t},
                              Constraint::independence(nxt, acc));
        ProofTree flip = step(RuleId::R2, {nxt, acc, std::nullopt}, {std::move(join)},
                              Constraint::independence(acc, nxt));
        t = step(RuleId::R3, {sa, acc, nxt}, {attr(idx[i]), std::move(flip)},
                 Constraint::independence(nxt, nxt));
        acc = nxt;
      }
    }
    set_memo_.emplace(s.bits(), t);
    return t;
  }

  /// key(target) from key(C): strip the constant part via R8, pad via R7.
  /// Requires (C - strip) within target and strip within the constant set.
  ProofTree key_from(AttrSet c, bool trivial, AttrSet strip, AttrSet target) {
    ProofTree t = trivial ? step(RuleId::R6, {}, {}, Constraint::key(cs_.schema().all()))
                          : hyp(Constraint::key(c));
    AttrSet have = c;
    if (!strip.empty()) {
      AttrSet rest = c - strip;
      t = step(RuleId::R8, {strip, rest, std::nullopt}, {set(strip), std::move(t)},
               Constraint::key(rest));
      have = rest;
    }
    if (!(have == target))
      t = step(RuleId::R7, {have, target - have, std::nullopt}, {std::move(t)},
               Constraint::key(target));
    return t;
  }

  static ProofTree hyp(const Constraint& c) { return {c, std::nullopt, {}, {}}; }
  static ProofTree step(RuleId r, Instantiation inst, std::vector<ProofTree> prem,
                        const Constraint& conclusion) {
    return {conclusion, r, std::move(inst), std::move(prem)};
  }

  /// ind(from ; to) out of a stored atom over {from, to} (R2 if flipped).
  ProofTree oriented(const Constraint& stored, AttrSet from, AttrSet to) {
    if (stored.lhs == from && stored.rhs == to) return hyp(stored);
    ProofTree h = hyp(stored);
    return step(RuleId::R2, {stored.lhs, stored.rhs, std::nullopt}, {std::move(h)},
                Constraint::independence(stored.rhs, stored.lhs));
  }

private:
  const ConstraintSet& cs_;
  const ConstantAnalysis& an_;
  std::map<int, ProofTree> attr_memo_;
  std::map<std::uint32_t, ProofTree> set_memo_;
};

}  // namespace detail

/// Attributes forced to a single value in every model of Σ (keys plus
/// single-attribute independence atoms). Fixpoint: a with ind(a ; a) in Σ is
/// constant; b is constant if some atom links it to an attribute a such that
/// a key needs at most {a} beyond already-constant attributes; and when a key
/// needs nothing beyond constant attributes, the relation has at most one
/// tuple, so every attribute is constant.
inline AttrSet constant_attributes(const ConstraintSet& cs) {
  return detail::analyze_constants(cs).constant;
}

/// How a failed implication can be refuted: rounds of the standard chase
/// prefix that witnesses independence while keeping the violation alive.
struct CountermodelRecipe {
  int rounds = 0;
};

struct ImplicationAnswer {
  bool implied = false;
  std::optional<ProofTree> proof;            // set when implied
  std::optional<CountermodelRecipe> recipe;  // set when not implied
};

namespace detail {

inline int schedule_length(const ConstraintSet& cs) {
  int n = 0;
  for (const auto& c : cs)
    if (c.is_independence() && !c.lhs.empty() && !c.rhs.empty()) ++n;
  return n;
}

inline ImplicationAnswer not_implied(const ConstraintSet& cs) {
  return {false, std::nullopt, CountermodelRecipe{3 * schedule_length(cs)}};
}

}  // namespace detail

/// Does Σ imply key(D)? Sound and complete over the admissible fragment; a
/// positive answer carries a derivation, a negative one a chase recipe.
inline ImplicationAnswer key_implied(const ConstraintSet& cs, AttrSet d) {
  detail::require_admissible(cs);
  if (!d.subset_of(cs.schema().all()))
    throw ValidationError("query names attributes outside the schema");
  auto an = detail::analyze_constants(cs);
  auto kd = detail::derivable_key(cs, an.constant, d);
  if (!kd) return detail::not_implied(cs);
  detail::ConstancyProofs pb(cs, an);
  AttrSet c = kd->first;
  return {true, pb.key_from(c, kd->second, c & an.constant, d), std::nullopt};
}

/// Does Σ imply ind(X ; Y) for sides of at most one attribute?
inline ImplicationAnswer ia_implied(const ConstraintSet& cs, AttrSet x, AttrSet y) {
  detail::require_admissible(cs);
  if (!(x | y).subset_of(cs.schema().all()))
    throw ValidationError("query names attributes outside the schema");
  if (x.size() > 1 || y.size() > 1)
    throw ValidationError("independence implication needs single-attribute sides");
  using detail::ConstancyProofs;
  using PT = ProofTree;

  // An empty side makes the atom vacuous.
  if (x.empty() && y.empty())
    return {true,
            ConstancyProofs::step(RuleId::R1, {AttrSet(), std::nullopt, std::nullopt}, {},
                                  Constraint::independence(AttrSet(), AttrSet())),
            std::nullopt};
  if (x.empty())
    return {true,
            ConstancyProofs::step(RuleId::R1, {y, std::nullopt, std::nullopt}, {},
                                  Constraint::independence(AttrSet(), y)),
            std::nullopt};
  if (y.empty()) {
    PT base = ConstancyProofs::step(RuleId::R1, {x, std::nullopt, std::nullopt}, {},
                                    Constraint::independence(AttrSet(), x));
    return {true,
            ConstancyProofs::step(RuleId::R2, {AttrSet(), x, std::nullopt}, {std::move(base)},
                                  Constraint::independence(x, AttrSet())),
            std::nullopt};
  }

  Constraint phi = Constraint::independence(x, y);
  if (cs.contains(phi)) {
    Constraint stored = phi.normalized();
    auto an = detail::analyze_constants(cs);
    ConstancyProofs pb(cs, an);
    return {true, pb.oriented(stored, x, y), std::nullopt};
  }

  auto an = detail::analyze_constants(cs);
  ConstancyProofs pb(cs, an);
  int a = x.front(), b = y.front();
  if (an.constant.contains(a)) {
    if (a == b) return {true, pb.attr(a), std::nullopt};
    PT r1 = ConstancyProofs::step(RuleId::R1, {y, std::nullopt, std::nullopt}, {},
                                  Constraint::independence(AttrSet(), y));
    return {true,
            ConstancyProofs::step(RuleId::R3, {x, AttrSet(), y}, {pb.attr(a), std::move(r1)},
                                  phi),
            std::nullopt};
  }
  if (an.constant.contains(b)) {
    PT r1 = ConstancyProofs::step(RuleId::R1, {x, std::nullopt, std::nullopt}, {},
                                  Constraint::independence(AttrSet(), x));
    PT swapped = ConstancyProofs::step(RuleId::R3, {y, AttrSet(), x}, {pb.attr(b), std::move(r1)},
                                       Constraint::independence(y, x));
    return {true,
            ConstancyProofs::step(RuleId::R2, {y, x, std::nullopt}, {std::move(swapped)}, phi),
            std::nullopt};
  }
  return detail::not_implied(cs);
}

/// Implication dispatcher for admissible queries (keys, or independence
/// atoms whose sides have at most one attribute).
inline ImplicationAnswer implies_general(const ConstraintSet& cs, const Constraint& phi) {
  if (phi.is_key()) return key_implied(cs, phi.lhs);
  if (phi.lhs.size() > 1 || phi.rhs.size() > 1)
    throw ValidationError("independence queries support single-attribute sides; "
                          "use derive for wider atoms");
  return ia_implied(cs, phi.lhs, phi.rhs);
}

}  // namespace iakr
