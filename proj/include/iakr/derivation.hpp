#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "iakr/constraint.hpp"
#include "iakr/core.hpp"

namespace iakr {

// Inference rules. Metavariables X, Y, Z range over attribute sets; juxta-
// position is union. Premise order is part of the template.
//   R1:                      |- ind( ; X)
//   R2: ind(X ; Y)           |- ind(Y ; X)
//   R3: ind(X ; X), ind(Y ; Z) |- ind(XY ; Z)
//   R4: ind(X ; YZ)          |- ind(X ; Y)
//   R5: ind(X ; Y), ind(XY ; Z) |- ind(X ; YZ)
//   R6:                      |- key(R)
//   R7: key(X)               |- key(XY)
//   R8: ind(X ; X), key(XY)  |- key(Y)
//   R9: ind(X ; Y), key(X)   |- ind(Y ; Y)
enum class RuleId : std::uint8_t { R1, R2, R3, R4, R5, R6, R7, R8, R9 };

inline const char* rule_name(RuleId r) {
  static constexpr const char* names[] = {"R1", "R2", "R3", "R4", "R5",
                                          "R6", "R7", "R8", "R9"};
  return names[static_cast<int>(r)];
}

inline std::optional<RuleId> rule_from_name(const std::string& s) {
  for (int i = 0; i < 9; ++i)
    if (s == rule_name(static_cast<RuleId>(i))) return static_cast<RuleId>(i);
  return std::nullopt;
}

inline int rule_arity(RuleId r) {
  static constexpr int arity[] = {0, 1, 2, 1, 2, 0, 1, 2, 2};
  return arity[static_cast<int>(r)];
}

/// Binding of a rule's metavariables. A rule uses exactly the variables its
/// template mentions; others must stay unbound.
struct Instantiation {
  std::optional<AttrSet> x, y, z;
  bool operator==(const Instantiation&) const = default;
};

/// One derivation step: `conclusion` follows from the premises' conclusions
/// by `rule` under `instantiation`. A node without a rule is a hypothesis.
struct ProofTree {
  Constraint conclusion;
  std::optional<RuleId> rule;
  Instantiation instantiation;
  std::vector<ProofTree> premises;

  bool is_hypothesis() const { return !rule.has_value(); }
  std::size_t node_count() const {
    std::size_t n = 1;
    for (const auto& p : premises) n += p.node_count();
    return n;
  }
};

namespace detail {

inline AttrSet bound(const Instantiation& inst, char var, RuleId rule) {
  const std::optional<AttrSet>& v = var == 'X' ? inst.x : var == 'Y' ? inst.y : inst.z;
  if (!v)
    throw ValidationError(std::string(rule_name(rule)) + ": metavariable " + var +
                          " is unbound");
  return *v;
}

inline void forbid(const Instantiation& inst, char var, RuleId rule) {
  const std::optional<AttrSet>& v = var == 'X' ? inst.x : var == 'Y' ? inst.y : inst.z;
  if (v)
    throw ValidationError(std::string(rule_name(rule)) + ": metavariable " + var +
                          " must be unbound");
}

inline void need_ia(const Constraint& c, AttrSet lhs, AttrSet rhs, RuleId rule, int idx,
                    const Schema& s) {
  if (!c.is_independence() || !(c.lhs == lhs) || !(c.rhs == rhs))
    throw ValidationError(std::string(rule_name(rule)) + ": premise " + std::to_string(idx) +
                          " must be " + Constraint::independence(lhs, rhs).format(s) +
                          ", got " + c.format(s));
}

inline void need_key(const Constraint& c, AttrSet lhs, RuleId rule, int idx, const Schema& s) {
  if (!c.is_key() || !(c.lhs == lhs))
    throw ValidationError(std::string(rule_name(rule)) + ": premise " + std::to_string(idx) +
                          " must be " + Constraint::key(lhs).format(s) + ", got " +
                          c.format(s));
}

}  // namespace detail

/// Applies one rule template and returns its conclusion. Throws
/// ValidationError if the binding or the premises do not fit the template.
inline Constraint apply_rule(RuleId rule, const Instantiation& inst,
                             const std::vector<Constraint>& premises, const Schema& schema) {
  using detail::bound;
  using detail::forbid;
  if (premises.size() != static_cast<std::size_t>(rule_arity(rule)))
    throw ValidationError(std::string(rule_name(rule)) + ": expects " +
                          std::to_string(rule_arity(rule)) + " premises, got " +
                          std::to_string(premises.size()));
  AttrSet all = schema.all();
  auto in_schema = [&](AttrSet s, char var) {
    if (!s.subset_of(all))
      throw ValidationError(std::string(rule_name(rule)) + ": metavariable " + var +
                            " names attributes outside the schema");
  };
  switch (rule) {
    case RuleId::R1: {
      AttrSet x = bound(inst, 'X', rule);
      forbid(inst, 'Y', rule);
      forbid(inst, 'Z', rule);
      in_schema(x, 'X');
      return Constraint::independence(AttrSet(), x);
    }
    case RuleId::R2: {
      AttrSet x = bound(inst, 'X', rule), y = bound(inst, 'Y', rule);
      forbid(inst, 'Z', rule);
      in_schema(x, 'X');
      in_schema(y, 'Y');
      detail::need_ia(premises[0], x, y, rule, 0, schema);
      return Constraint::independence(y, x);
    }
    case RuleId::R3: {
      AttrSet x = bound(inst, 'X', rule), y = bound(inst, 'Y', rule), z = bound(inst, 'Z', rule);
      in_schema(x, 'X');
      in_schema(y, 'Y');
      in_schema(z, 'Z');
      detail::need_ia(premises[0], x, x, rule, 0, schema);
      detail::need_ia(premises[1], y, z, rule, 1, schema);
      return Constraint::independence(x | y, z);
    }
    case RuleId::R4: {
      AttrSet x = bound(inst, 'X', rule), y = bound(inst, 'Y', rule), z = bound(inst, 'Z', rule);
      in_schema(x, 'X');
      in_schema(y, 'Y');
      in_schema(z, 'Z');
      detail::need_ia(premises[0], x, y | z, rule, 0, schema);
      return Constraint::independence(x, y);
    }
    case RuleId::R5: {
      AttrSet x = bound(inst, 'X', rule), y = bound(inst, 'Y', rule), z = bound(inst, 'Z', rule);
      in_schema(x, 'X');
      in_schema(y, 'Y');
      in_schema(z, 'Z');
      detail::need_ia(premises[0], x, y, rule, 0, schema);
      detail::need_ia(premises[1], x | y, z, rule, 1, schema);
      return Constraint::independence(x, y | z);
    }
    case RuleId::R6: {
      forbid(inst, 'X', rule);
      forbid(inst, 'Y', rule);
      forbid(inst, 'Z', rule);
      return Constraint::key(all);
    }
    case RuleId::R7: {
      AttrSet x = bound(inst, 'X', rule), y = bound(inst, 'Y', rule);
      forbid(inst, 'Z', rule);
      in_schema(x, 'X');
      in_schema(y, 'Y');
      detail::need_key(premises[0], x, rule, 0, schema);
      return Constraint::key(x | y);
    }
    case RuleId::R8: {
      AttrSet x = bound(inst, 'X', rule), y = bound(inst, 'Y', rule);
      forbid(inst, 'Z', rule);
      in_schema(x, 'X');
      in_schema(y, 'Y');
      detail::need_ia(premises[0], x, x, rule, 0, schema);
      detail::need_key(premises[1], x | y, rule, 1, schema);
      return Constraint::key(y);
    }
    case RuleId::R9: {
      AttrSet x = bound(inst, 'X', rule), y = bound(inst, 'Y', rule);
      forbid(inst, 'Z', rule);
      in_schema(x, 'X');
      in_schema(y, 'Y');
      detail::need_ia(premises[0], x, y, rule, 0, schema);
      detail::need_key(premises[1], x, rule, 1, schema);
      return Constraint::independence(y, y);
    }
  }
  throw InternalError("unknown rule");
}

struct ProofCheckResult {
  bool ok = true;
  std::string error;
};

namespace detail {

inline ProofCheckResult check_proof_at(const ProofTree& t, const ConstraintSet& hyps,
                                       const std::string& path) {
  const Schema& s = hyps.schema();
  auto fail = [&](const std::string& msg) {
    return ProofCheckResult{false, path + ": " + msg};
  };
  if (!t.conclusion.attrs().subset_of(s.all()))
    return fail("conclusion names attributes outside the schema");
  if (t.is_hypothesis()) {
    if (!t.premises.empty()) return fail("hypothesis node has premises");
    if (!hyps.contains_literal(t.conclusion))
      return fail("not a hypothesis: " + t.conclusion.format(s) +
                  " (orientation matters; derive the flip with R2)");
    return {};
  }
  for (std::size_t i = 0; i < t.premises.size(); ++i) {
    auto sub = check_proof_at(t.premises[i], hyps, path + ".premises[" + std::to_string(i) + "]");
    if (!sub.ok) return sub;
  }
  std::vector<Constraint> prem;
  prem.reserve(t.premises.size());
  for (const auto& p : t.premises) prem.push_back(p.conclusion);
  try {
    Constraint got = apply_rule(*t.rule, t.instantiation, prem, s);
    if (!(got == t.conclusion))
      return fail(std::string(rule_name(*t.rule)) + " yields " + got.format(s) +
                  ", node claims " + t.conclusion.format(s));
  } catch (const ValidationError& e) {
    return fail(e.what());
  }
  return {};
}

}  // namespace detail

/// Verifies a proof tree bottom-up: hypothesis leaves must match a stated
/// hypothesis exactly (orientation included) and every step must re-derive
/// its conclusion via apply_rule.
inline ProofCheckResult check_proof(const ProofTree& t, const ConstraintSet& hypotheses) {
  return detail::check_proof_at(t, hypotheses, "proof");
}

/// Everything derivable from a hypothesis set via R1-R9, with one recorded
/// derivation per member for proof extraction.
class Saturation {
public:
  static constexpr int kDefaultCap = 6;
  static constexpr int kHardCap = 10;  // slot table is 2^w + 4^w entries

  explicit Saturation(const ConstraintSet& hypotheses, int cap = kDefaultCap)
      : hyps_(hypotheses), width_(hypotheses.schema().width()) {
    if (cap < 1 || cap > kHardCap)
      throw ValidationError("saturation cap must be between 1 and " + std::to_string(kHardCap));
    if (width_ > cap)
      throw ValidationError("schema has " + std::to_string(width_) +
                            " attributes; saturation is capped at " + std::to_string(cap));
    key_codes_ = std::uint32_t{1} << width_;
    slots_.resize(key_codes_ + (std::uint64_t{1} << (2 * width_)));
    run();
  }

  const Schema& schema() const { return hyps_.schema(); }
  const ConstraintSet& hypotheses() const { return hyps_; }
  std::size_t size() const { return member_count_; }

  bool derives(const Constraint& c) const {
    check_in_schema(c);
    return slots_[encode(c)].present;
  }

  /// Members in canonical constraint order.
  std::vector<Constraint> members() const {
    std::vector<Constraint> out;
    out.reserve(member_count_);
    for (std::uint32_t code = 0; code < slots_.size(); ++code)
      if (slots_[code].present) out.push_back(decode(code));
    std::sort(out.begin(), out.end(),
              [](const Constraint& a, const Constraint& b) { return Constraint::compare(a, b) < 0; });
    return out;
  }

  ProofTree proof_of(const Constraint& c) const {
    check_in_schema(c);
    if (!slots_[encode(c)].present)
      throw ValidationError("not derivable: " + c.format(schema()));
    std::size_t budget = kProofNodeBudget;
    return build_proof(encode(c), budget);
  }

private:
  static constexpr std::size_t kProofNodeBudget = 1u << 20;

  struct Node {
    bool present = false;
    bool hypothesis = false;
    RuleId rule = RuleId::R1;
    Instantiation inst;
    std::array<std::int32_t, 2> prem{-1, -1};
  };

  struct Decoded {
    bool is_key;
    AttrSet lhs, rhs;
  };

  void check_in_schema(const Constraint& c) const {
    if (!c.attrs().subset_of(schema().all()))
      throw ValidationError("constraint names attributes outside the schema");
  }

  std::uint32_t encode_key(AttrSet x) const { return x.bits(); }
  std::uint32_t encode_ia(AttrSet x, AttrSet y) const {
    return key_codes_ + (x.bits() | (y.bits() << width_));
  }
  std::uint32_t encode(const Constraint& c) const {
    return c.is_key() ? encode_key(c.lhs) : encode_ia(c.lhs, c.rhs);
  }
  Decoded decode_parts(std::uint32_t code) const {
    if (code < key_codes_) return {true, AttrSet::from_bits(code), AttrSet()};
    std::uint32_t t = code - key_codes_;
    return {false, AttrSet::from_bits(t & (key_codes_ - 1)), AttrSet::from_bits(t >> width_)};
  }
  Constraint decode(std::uint32_t code) const {
    Decoded d = decode_parts(code);
    return d.is_key ? Constraint::key(d.lhs) : Constraint::independence(d.lhs, d.rhs);
  }

  void seed(std::uint32_t code, bool hyp, RuleId rule, Instantiation inst, std::int32_t p0,
            std::int32_t p1) {
    Node& n = slots_[code];
    if (n.present) return;
    n.present = true;
    n.hypothesis = hyp;
    n.rule = rule;
    n.inst = std::move(inst);
    n.prem = {p0, p1};
    ++member_count_;
    pending_.push(code);
  }

  void run() {
    for (const auto& c : hyps_) seed(encode(c), true, RuleId::R1, {}, -1, -1);
    for (std::uint32_t bits = 0; bits < key_codes_; ++bits)
      seed(encode_ia(AttrSet(), AttrSet::from_bits(bits)), false, RuleId::R1,
           {AttrSet::from_bits(bits), std::nullopt, std::nullopt}, -1, -1);
    seed(encode_key(schema().all()), false, RuleId::R6, {}, -1, -1);

    std::vector<std::uint32_t> processed;
    while (!pending_.empty()) {
      std::uint32_t code = pending_.top();
      pending_.pop();
      Decoded c = decode_parts(code);
      std::int32_t ic = static_cast<std::int32_t>(code);

      if (!c.is_key) {
        // R2
        seed(encode_ia(c.rhs, c.lhs), false, RuleId::R2, {c.lhs, c.rhs, std::nullopt}, ic, -1);
        // R4: every split of the right-hand side
        std::uint32_t rhs = c.rhs.bits();
        for (std::uint32_t s = rhs;; s = (s - 1) & rhs) {
          AttrSet y = AttrSet::from_bits(s);
          seed(encode_ia(c.lhs, y), false, RuleId::R4, {c.lhs, y, c.rhs - y}, ic, -1);
          if (s == 0) break;
        }
      } else {
        // R7: every superset
        std::uint32_t comp = schema().all().bits() & ~c.lhs.bits();
        for (std::uint32_t s = comp;; s = (s - 1) & comp) {
          AttrSet y = AttrSet::from_bits(s);
          seed(encode_key(c.lhs | y), false, RuleId::R7, {c.lhs, y, std::nullopt}, ic, -1);
          if (s == 0) break;
        }
      }

      processed.push_back(code);
      for (std::uint32_t other : processed) {
        binary_rules(code, c, other, decode_parts(other));
        if (other != code) binary_rules(other, decode_parts(other), code, c);
      }
    }
  }

  // Applies R3, R5, R8, R9 with `a` as first premise and `b` as second.
  void binary_rules(std::uint32_t ca, const Decoded& a, std::uint32_t cb, const Decoded& b) {
    std::int32_t ia = static_cast<std::int32_t>(ca), ib = static_cast<std::int32_t>(cb);
    if (!a.is_key && a.lhs == a.rhs) {
      if (!b.is_key)  // R3
        seed(encode_ia(a.lhs | b.lhs, b.rhs), false, RuleId::R3, {a.lhs, b.lhs, b.rhs}, ia, ib);
      else if (a.lhs.subset_of(b.lhs))  // R8 (minimal remainder; R7 pads the rest)
        seed(encode_key(b.lhs - a.lhs), false, RuleId::R8, {a.lhs, b.lhs - a.lhs, std::nullopt},
             ia, ib);
    }
    if (!a.is_key && !b.is_key && b.lhs == (a.lhs | a.rhs))  // R5
      seed(encode_ia(a.lhs, a.rhs | b.rhs), false, RuleId::R5, {a.lhs, a.rhs, b.rhs}, ia, ib);
    if (!a.is_key && b.is_key && b.lhs == a.lhs)  // R9
      seed(encode_ia(a.rhs, a.rhs), false, RuleId::R9, {a.lhs, a.rhs, std::nullopt}, ia, ib);
  }

  ProofTree build_proof(std::uint32_t code, std::size_t& budget) const {
    if (budget == 0) throw InternalError("proof tree exceeds the node budget");
    --budget;
    const Node& n = slots_[code];
    ProofTree t{decode(code), std::nullopt, {}, {}};
    if (n.hypothesis) return t;
    t.rule = n.rule;
    t.instantiation = n.inst;
    for (std::int32_t p : n.prem)
      if (p >= 0) t.premises.push_back(build_proof(static_cast<std::uint32_t>(p), budget));
    return t;
  }

  ConstraintSet hyps_;
  int width_;
  std::uint32_t key_codes_ = 0;
  std::vector<Node> slots_;
  std::size_t member_count_ = 0;
  std::priority_queue<std::uint32_t, std::vector<std::uint32_t>, std::greater<>> pending_;
};

inline Saturation saturate(const ConstraintSet& hypotheses, int cap = Saturation::kDefaultCap) {
  return Saturation(hypotheses, cap);
}

}  // namespace iakr
