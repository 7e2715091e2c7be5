#include <gtest/gtest.h>

#include "iakr/decision.hpp"
#include "iakr/parser.hpp"

#include "test_util.hpp"

namespace iakr {
namespace {

ConstraintSet sigma(const char* text) { return parse_constraints(text); }

TEST(ConstantAttributes, FixpointCases) {
  // Self-independence pins an attribute to one value.
  ConstraintSet a = sigma("schema R: A B;\nind(A ; A);\n");
  EXPECT_EQ(constant_attributes(a), a.schema().set_of({"A"}));

  // A constant key collapses everything.
  ConstraintSet b = sigma("schema R: A B C;\nind(A ; A);\nkey(A);\n");
  EXPECT_EQ(constant_attributes(b), b.schema().all());

  // Propagation across an atom needs a key inside the linking attribute.
  ConstraintSet c = sigma("schema R: A B C;\nkey(A);\nind(A ; B);\n");
  EXPECT_EQ(constant_attributes(c), c.schema().set_of({"B"}));

  // No hypotheses, no constants.
  ConstraintSet d = sigma("schema R: A B;\n");
  EXPECT_TRUE(constant_attributes(d).empty());

  // Empty-sided atoms are vacuous and must not trigger propagation.
  ConstraintSet e = sigma("schema R: A B;\nind( ; A);\nkey(A);\n");
  EXPECT_TRUE(constant_attributes(e).empty());
}

TEST(Implication, KeyQueries) {
  ConstraintSet cs = sigma("schema R: A B;\nind(A ; A);\nkey(A B);\n");
  Schema s = cs.schema();

  ImplicationAnswer yes = implies_general(cs, parse_query("key(B)", s));
  EXPECT_TRUE(yes.implied);
  ASSERT_TRUE(yes.proof.has_value());
  ProofCheckResult chk = check_proof(*yes.proof, cs);
  EXPECT_TRUE(chk.ok) << chk.error;
  EXPECT_EQ(yes.proof->conclusion, parse_query("key(B)", s));

  // Everything is a key once the whole schema is one.
  EXPECT_TRUE(implies_general(cs, parse_query("key(A B)", s)).implied);
  ImplicationAnswer no = implies_general(sigma("schema R: A B;\nkey(A);\n"),
                                         parse_query("key(B)", s));
  EXPECT_FALSE(no.implied);
  ASSERT_TRUE(no.recipe.has_value());
  EXPECT_EQ(no.recipe->rounds, 0);  // no scheduled atoms
}

TEST(Implication, IndependenceQueries) {
  Schema s = Schema("R", {"A", "B", "C"});

  // Direct membership up to symmetry.
  ConstraintSet cs = sigma("schema R: A B C;\nind(A ; B);\n");
  EXPECT_TRUE(implies_general(cs, parse_query("ind(B ; A)", s)).implied);
  EXPECT_FALSE(implies_general(cs, parse_query("ind(A ; C)", s)).implied);

  // Via a constant attribute.
  ConstraintSet con = sigma("schema R: A B C;\nind(A ; B);\nkey(A);\n");
  EXPECT_TRUE(implies_general(con, parse_query("ind(B ; B)", s)).implied);
  EXPECT_TRUE(implies_general(con, parse_query("ind(B ; C)", s)).implied);
  EXPECT_TRUE(implies_general(con, parse_query("ind(C ; B)", s)).implied);
  EXPECT_FALSE(implies_general(con, parse_query("ind(A ; C)", s)).implied);

  // Empty sides are implied outright.
  EXPECT_TRUE(implies_general(cs, parse_query("ind( ; C)", s)).implied);
  EXPECT_TRUE(implies_general(cs, parse_query("ind(C ; )", s)).implied);
  EXPECT_TRUE(implies_general(sigma("schema R: A B C;\n"), parse_query("ind( ; )", s)).implied);

  // Wide atoms are out of scope for the decision procedure.
  EXPECT_THROW(implies_general(cs, parse_query("ind(A ; B C)", s)), ValidationError);
  // So are hypotheses with wide genuine atoms when asked to decide.
  ConstraintSet wide = sigma("schema R: A B C;\nind(A ; B C);\n");
  EXPECT_THROW(implies_general(wide, parse_query("key(A)", s)), ValidationError);
}

TEST(Implication, EveryImpliedAnswerCarriesACheckedProof) {
  Schema s = iakr::testing::letters_schema(3);
  auto pool = iakr::testing::key_unary_pool(s);
  auto queries = iakr::testing::key_unary_queries(s);
  auto subsets = iakr::testing::small_subsets(static_cast<int>(pool.size()), 2);
  int proofs = 0;
  for (std::size_t idx = 0; idx < subsets.size(); idx += 5) {
    ConstraintSet cs = iakr::testing::make_sigma(s, pool, subsets[idx]);
    for (const auto& q : queries) {
      ImplicationAnswer ans = implies_general(cs, q);
      if (ans.implied) {
        ASSERT_TRUE(ans.proof.has_value());
        ProofCheckResult chk = check_proof(*ans.proof, cs);
        ASSERT_TRUE(chk.ok) << q.format(s) << ": " << chk.error;
        ASSERT_EQ(ans.proof->conclusion, q);
        ++proofs;
      } else {
        ASSERT_TRUE(ans.recipe.has_value());
      }
    }
  }
  EXPECT_GT(proofs, 100);
}

TEST(Implication, AgreesWithSaturationOnTinySchemas) {
  Schema s = iakr::testing::letters_schema(2);
  auto pool = iakr::testing::key_unary_pool(s);
  auto queries = iakr::testing::key_unary_queries(s);
  auto subsets = iakr::testing::small_subsets(static_cast<int>(pool.size()), 2);
  for (const auto& picks : subsets) {
    ConstraintSet cs = iakr::testing::make_sigma(s, pool, picks);
    Saturation sat = saturate(cs);
    for (const auto& q : queries)
      ASSERT_EQ(implies_general(cs, q).implied, sat.derives(q))
          << print_constraints(cs) << " |- " << q.format(s);
  }
}

TEST(KeyImplied, MatchesStrippingRule) {
  // key(C) follows from key(A C) once A is constant, but key(B) does not.
  ConstraintSet cs = sigma("schema R: A B C;\nind(A ; A);\nkey(A C);\n");
  Schema s = cs.schema();
  EXPECT_TRUE(implies_general(cs, parse_query("key(C)", s)).implied);
  EXPECT_TRUE(implies_general(cs, parse_query("key(B C)", s)).implied);
  EXPECT_FALSE(implies_general(cs, parse_query("key(B)", s)).implied);
  EXPECT_FALSE(implies_general(cs, parse_query("key()", s)).implied);

  // With every attribute constant, even the empty key follows.
  ConstraintSet all = sigma("schema R: A B;\nind(A ; A);\nind(B ; B);\nkey(A B);\n");
  EXPECT_TRUE(implies_general(all, parse_query("key()", all.schema())).implied);
}

}  // namespace
}  // namespace iakr
