#include <gtest/gtest.h>

#include "iakr/countermodel.hpp"
#include "iakr/parser.hpp"

#include "test_util.hpp"

namespace iakr {
namespace {

std::vector<std::vector<Value>> all_rows(const Relation& r) {
  std::vector<std::vector<Value>> out;
  for (std::size_t t = 0; t < r.size(); ++t) out.push_back(r.row_copy(t));
  return out;
}

TEST(VerifyCountermodel, ChecksBothSides) {
  ConstraintSet cs = parse_constraints("schema R: A B;\nkey(A);\n");
  Schema s = cs.schema();
  Relation good(s);
  good.append_row({0, 0});
  good.append_row({1, 0});
  CountermodelCheck ok = verify_countermodel(good, cs, parse_query("key(B)", s));
  EXPECT_TRUE(ok.ok);
  EXPECT_TRUE(ok.constraints.all_hold);
  EXPECT_FALSE(ok.target_result.holds());

  // Fails when a hypothesis breaks.
  Relation bad(s);
  bad.append_row({0, 0});
  bad.append_row({0, 1});
  EXPECT_FALSE(verify_countermodel(bad, cs, parse_query("key(B)", s)).ok);

  // Fails when the target actually holds.
  Relation holds(s);
  holds.append_row({0, 0});
  holds.append_row({1, 1});
  EXPECT_FALSE(verify_countermodel(holds, cs, parse_query("key(B)", s)).ok);
}

TEST(ChasePrefix, ReproducesTheTwoSeedConstruction) {
  ConstraintSet cs = parse_constraints(
      "schema R: A B C;\n"
      "ind(A ; B);\n"
      "key(A B);\n");
  Schema s = cs.schema();
  ChasePrefix prefix = theorem2_prefix(cs, parse_query("ind(A ; C)", s), 1);
  EXPECT_EQ(all_rows(prefix.relation()),
            (std::vector<std::vector<Value>>{
                {1, 2, 3}, {4, 5, 6}, {1, 5, 12}, {4, 2, 15}}));
  EXPECT_EQ(prefix.rounds_done(), 1);
  EXPECT_TRUE(prefix.constant_set().empty());
  ASSERT_EQ(prefix.seed_rows().size(), 2u);
  EXPECT_EQ(prefix.seed_rows()[0], (std::vector<Value>{1, 2, 3}));
}

TEST(ChasePrefix, InvariantsSurviveEveryRound) {
  ConstraintSet cs = parse_constraints(
      "schema R: A B C;\n"
      "ind(A ; B);\n"
      "ind(B ; C);\n"
      "key(A B C);\n");
  Schema s = cs.schema();
  Constraint target = parse_query("key(A)", s);
  ChasePrefix prefix = theorem2_prefix(cs, target, 0);
  for (int round = 1; round <= 7; ++round) {
    prefix.advance(1);
    EXPECT_EQ(prefix.rounds_done(), round);
    EXPECT_NO_THROW(prefix.verify()) << "round " << round;
    const Relation& r = prefix.relation();
    for (const auto& k : cs.keys()) EXPECT_TRUE(satisfies_key(r, k.lhs).holds());
    EXPECT_FALSE(satisfies_key(r, target.lhs).holds());
    // The atom completed most recently holds right now.
    const auto& schedule = prefix.schedule();
    const Constraint& last = schedule[(round - 1) % schedule.size()];
    EXPECT_TRUE(satisfies_ia(r, last.lhs, last.rhs).holds());
  }
  EXPECT_THROW(prefix.advance(-1), ValidationError);
}

TEST(ChasePrefix, ImpliedTargetsAreRejected) {
  ConstraintSet cs = parse_constraints("schema R: A B;\nkey(A);\n");
  EXPECT_THROW(theorem2_prefix(cs, parse_query("key(A B)", cs.schema())), ValidationError);
  EXPECT_THROW(theorem2_prefix(cs, parse_query("ind( ; B)", cs.schema())), ValidationError);
}

TEST(ChasePrefix, ConstantColumnsStayZero) {
  // A is pinned constant; the target key(B) keeps rows 0/1 agreeing on B.
  ConstraintSet cs = parse_constraints(
      "schema R: A B C;\n"
      "ind(A ; A);\n"
      "ind(B ; C);\n");
  Schema s = cs.schema();
  ChasePrefix prefix = theorem2_prefix(cs, parse_query("key(B)", s));
  const Relation& r = prefix.relation();
  EXPECT_EQ(prefix.constant_set(), s.set_of({"A"}));
  for (std::size_t t = 0; t < r.size(); ++t) EXPECT_EQ(r.value(t, 0), 0);
  EXPECT_EQ(r.value(0, 1), r.value(1, 1));  // rows 0/1 agree on B
  EXPECT_NO_THROW(prefix.verify());
}

TEST(ChainModels, FrozenSizesAndContents) {
  ChasePrefix d2 = lemma2_chain(2);
  EXPECT_EQ(all_rows(d2.relation()),
            (std::vector<std::vector<Value>>{
                {0, 0, 1, 2}, {0, 0, 3, 4}, {5, 6, 1, 4}, {7, 8, 3, 2}}));

  const std::vector<std::size_t> sizes{2, 4, 10, 64, 3250};
  const std::vector<Value> maxes{4, 8, 20, 128, 6500};
  for (int d = 1; d <= 5; ++d) {
    ChasePrefix chain = lemma2_chain(d);
    EXPECT_EQ(chain.relation().size(), sizes[d - 1]) << "depth " << d;
    EXPECT_EQ(chain.max_value(), maxes[d - 1]) << "depth " << d;
    EXPECT_NO_THROW(chain.verify());
    // Chain prefixes nest: every earlier relation is a prefix of the next.
    if (d > 1) {
      ChasePrefix prev = lemma2_chain(d - 1);
      auto big = all_rows(chain.relation());
      auto small = all_rows(prev.relation());
      big.resize(small.size());
      EXPECT_EQ(big, small);
    }
  }
  EXPECT_THROW(lemma2_chain(0), ValidationError);
}

TEST(ChainModels, AlternatingAtomsAndPersistentViolation) {
  Schema s = lemma2_chain(1).relation().schema();
  AttrSet a1 = s.set_of({"A1"}), b1 = s.set_of({"B1"});
  AttrSet a2 = s.set_of({"A2"}), b2 = s.set_of({"B2"});
  for (int d = 1; d <= 5; ++d) {
    const Relation r = lemma2_chain(d).relation();
    EXPECT_TRUE(satisfies_key(r, b1 | a2).holds()) << d;
    EXPECT_TRUE(satisfies_key(r, b2 | a1).holds()) << d;
    EXPECT_FALSE(satisfies_key(r, a1 | b1).holds()) << d;
    // Odd depths complete ind(A1 ; B1), even depths ind(A2 ; B2).
    if (d % 2 == 1)
      EXPECT_TRUE(satisfies_ia(r, a1, b1).holds()) << d;
    else
      EXPECT_TRUE(satisfies_ia(r, a2, b2).holds()) << d;
  }
}

}  // namespace
}  // namespace iakr
