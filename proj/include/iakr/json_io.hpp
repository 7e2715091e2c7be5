#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "iakr/constraint.hpp"
#include "iakr/core.hpp"
#include "iakr/countermodel.hpp"
#include "iakr/csv.hpp"
#include "iakr/decision.hpp"
#include "iakr/derivation.hpp"
#include "iakr/relation.hpp"
#include "iakr/semantics.hpp"
#include "iakr/separation.hpp"

// JSON views of the library's results. Keys are emitted in sorted order
// (nlohmann's default object is an ordered map), so payloads are
// byte-deterministic for fixed inputs.

namespace iakr {

using json = nlohmann::json;

inline json names_json(const Schema& schema, AttrSet s) {
  json arr = json::array();
  for (const auto& name : schema.names_of(s)) arr.push_back(name);
  return arr;
}

inline json report_json(const SatisfactionReport& report, const Schema& schema) {
  json entries = json::array();
  for (const auto& e : report.entries) {
    json entry{{"constraint", e.constraint.format(schema)},
               {"verdict", e.result.holds() ? "holds" : "violated"}};
    if (e.result.witness)
      entry["witness"] = {(*e.result.witness)[0], (*e.result.witness)[1]};
    entries.push_back(std::move(entry));
  }
  return json{{"entries", std::move(entries)}, {"all_hold", report.all_hold}};
}

inline json proof_json(const ProofTree& proof, const Schema& schema) {
  json node{{"conclusion", proof.conclusion.format(schema)}};
  if (proof.is_hypothesis()) {
    node["rule"] = "hypothesis";
  } else {
    node["rule"] = rule_name(*proof.rule);
    json inst;
    if (proof.instantiation.x) inst["X"] = names_json(schema, *proof.instantiation.x);
    if (proof.instantiation.y) inst["Y"] = names_json(schema, *proof.instantiation.y);
    if (proof.instantiation.z) inst["Z"] = names_json(schema, *proof.instantiation.z);
    if (!inst.is_null()) node["instantiation"] = std::move(inst);
  }
  json premises = json::array();
  for (const auto& p : proof.premises) premises.push_back(proof_json(p, schema));
  node["premises"] = std::move(premises);
  return node;
}

inline json constraints_json(const ConstraintSet& cs) {
  json arr = json::array();
  for (const auto& c : cs) arr.push_back(c.format(cs.schema()));
  return arr;
}

inline json rows_json(const Relation& r) {
  json rows = json::array();
  for (std::size_t t = 0; t < r.size(); ++t) {
    json row = json::array();
    for (int c = 0; c < r.width(); ++c) row.push_back(r.display(r.value(t, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json schedule_json(const CardinalitySchedule& sch, const Schema& schema) {
  return json{{"n", sch.n},     {"D", names_json(schema, sch.d)},
              {"m", sch.m},     {"M", sch.big_m},
              {"a", sch.a},     {"b", sch.b}};
}

inline json manifest_json(const ChasePrefix& prefix) {
  json schedule = json::array();
  for (const auto& c : prefix.schedule()) schedule.push_back(c.format(prefix.relation().schema()));
  json seed = json::array();
  for (const auto& row : prefix.seed_rows()) seed.push_back(row);
  return json{
      {"seed", std::move(seed)},
      {"schedule", std::move(schedule)},
      {"rounds", prefix.rounds_done()},
      {"guarantees",
       {"every hypothesis key holds in every prefix",
        "the most recently completed scheduled atom holds",
        "the target stays violated in every prefix",
        "advancing more rounds preserves all of the above"}}};
}

inline json counting_chain_json(const CountingChain& cc) {
  return json{{"n", cc.n},
              {"total", cc.total},
              {"key_pair_card", cc.key_pair_card},
              {"b_cards", cc.b_cards},
              {"a1_card", cc.a1_card},
              {"a1b1_card", cc.a1b1_card},
              {"concludes_key", cc.concludes_key},
              {"direct_check_agrees", cc.direct_check_agrees}};
}

inline json kary_demo_json(const KaryDemo& demo) {
  return json{{"n", demo.n},
              {"arity_bound", demo.arity_bound},
              {"pairs_verified", demo.pairs_verified},
              {"max_model_rows", demo.max_model_rows},
              {"lemma_counts", demo.lemma_counts},
              {"gap_atom", demo.gap_atom},
              {"gap_in_upward_closure", demo.gap_in_upward_closure},
              {"chain_proves_gap", demo.chain_proves_gap}};
}

}  // namespace iakr
