#include <gtest/gtest.h>

#include "iakr/separation.hpp"
#include "iakr/parser.hpp"

#include "test_util.hpp"

namespace iakr {
namespace {

std::vector<std::vector<Value>> all_rows(const Relation& r) {
  std::vector<std::vector<Value>> out;
  for (std::size_t t = 0; t < r.size(); ++t) out.push_back(r.row_copy(t));
  return out;
}

TEST(CyclicFamily, StructureAndBounds) {
  SigmaN sn = sigma_n(2);
  EXPECT_EQ(sn.schema.attrs(), (std::vector<std::string>{"A1", "B1", "A2", "B2"}));
  std::vector<std::string> got;
  for (const auto& c : sn.sigma) got.push_back(c.format(sn.schema));
  EXPECT_EQ(got, (std::vector<std::string>{"key(A1 B2)", "key(B1 A2)", "ind(A1 ; B1)",
                                           "ind(A2 ; B2)"}));
  EXPECT_THROW(sigma_n(1), ValidationError);
  EXPECT_THROW(sigma_n(13), ValidationError);
}

TEST(UpwardClosure, MembershipAndCount) {
  SigmaN sn = sigma_n(2);
  EXPECT_EQ(upward_members(sn).size(), 9u);
  EXPECT_TRUE(upward_contains(sn, Constraint::key(sn.b(1) | sn.a(2))));
  EXPECT_TRUE(upward_contains(sn, Constraint::key(sn.schema.all())));
  EXPECT_FALSE(upward_contains(sn, Constraint::key(sn.a(1) | sn.b(1))));
  EXPECT_FALSE(upward_contains(sn, Constraint::key(AttrSet())));
  EXPECT_TRUE(upward_contains(sn, Constraint::independence(sn.b(1), sn.a(1))));
  EXPECT_FALSE(upward_contains(sn, Constraint::independence(sn.a(1), sn.a(2))));

  // |C| = 2n * 2^(2n-2) keys by inclusion-exclusion at n=3, plus the n atoms.
  SigmaN s3 = sigma_n(3);
  EXPECT_EQ(upward_members(s3).size(), 37u + 3u);
}

TEST(CardinalitySchedules, FrozenValuesAndIntegrality) {
  SigmaN s7 = sigma_n(7);
  AttrSet d = s7.schema.set_of({"A1", "B1", "A3", "B3", "A5", "B5", "A7"});
  CardinalitySchedule sch = lemma3_schedule(s7, d);
  EXPECT_EQ(sch.m, 3);
  EXPECT_EQ(sch.big_m, 720);
  EXPECT_EQ(sch.a, (std::vector<std::int64_t>{2, 3, 3, 4, 4, 5, 5}));
  EXPECT_EQ(sch.b, (std::vector<std::int64_t>{240, 240, 180, 180, 144, 144, 144}));

  SigmaN s2 = sigma_n(2);
  CardinalitySchedule sch2 = lemma3_schedule(s2, s2.a(2));
  EXPECT_EQ(sch2.m, 0);
  EXPECT_EQ(sch2.big_m, 6);
  EXPECT_EQ(sch2.a, (std::vector<std::int64_t>{2, 2}));
  EXPECT_EQ(sch2.b, (std::vector<std::int64_t>{3, 3}));

  // Every schedule divides evenly: b[i] * (a[i] or a[i]+1) == M.
  SigmaN s3 = sigma_n(3);
  for (std::uint32_t bits = 0; bits <= s3.schema.all().bits(); ++bits) {
    CardinalitySchedule any = lemma3_schedule(s3, AttrSet::from_bits(bits));
    for (int i = 0; i < any.n; ++i) {
      bool pair_in = (s3.a(i + 1) | s3.b(i + 1)).subset_of(any.d);
      EXPECT_EQ(any.b[i] * (any.a[i] + (pair_in ? 1 : 0)), any.big_m);
    }
  }
}

TEST(StructuredModels, MatchTheFigure) {
  SigmaN s7 = sigma_n(7);
  AttrSet d = s7.schema.set_of({"A1", "B1", "A3", "B3", "A5", "B5", "A7"});
  Relation r = lemma3_model(s7, d);
  ASSERT_EQ(r.size(), 720u);
  auto head = [&](std::size_t t) {
    return std::vector<Value>{r.value(t, 0), r.value(t, 1), r.value(t, 2), r.value(t, 3)};
  };
  EXPECT_EQ(head(0), (std::vector<Value>{0, 0, 0, 0}));
  EXPECT_EQ(head(1), (std::vector<Value>{0, 0, 1, 1}));
  EXPECT_EQ(head(2), (std::vector<Value>{1, 0, 2, 0}));
  EXPECT_EQ(head(3), (std::vector<Value>{0, 1, 0, 1}));
  EXPECT_EQ(head(4), (std::vector<Value>{0, 1, 1, 0}));
  EXPECT_EQ(head(5), (std::vector<Value>{1, 1, 2, 1}));
  EXPECT_EQ(head(6), (std::vector<Value>{0, 2, 0, 2}));
  EXPECT_EQ(head(7), (std::vector<Value>{0, 2, 1, 2}));
  EXPECT_EQ(head(8), (std::vector<Value>{1, 2, 2, 2}));
  EXPECT_EQ(head(717), (std::vector<Value>{0, 239, 0, 239}));
  EXPECT_EQ(head(718), (std::vector<Value>{0, 239, 1, 239}));
  EXPECT_EQ(head(719), (std::vector<Value>{1, 239, 2, 239}));
}

TEST(StructuredModels, SmallCaseExactRows) {
  SigmaN s2 = sigma_n(2);
  Relation r = lemma3_model(s2, s2.a(2));
  EXPECT_EQ(all_rows(r), (std::vector<std::vector<Value>>{{0, 0, 0, 0},
                                                          {1, 1, 0, 1},
                                                          {0, 1, 1, 0},
                                                          {1, 0, 1, 1},
                                                          {0, 2, 0, 2},
                                                          {1, 2, 1, 2}}));
}

TEST(StructuredModels, EveryValidTargetVerifiesAtSmallSizes) {
  for (int n = 2; n <= 3; ++n) {
    SigmaN sn = sigma_n(n);
    Constraint dropped_key = Constraint::key(sn.b(n) | sn.a(1));
    Constraint dropped_ia = Constraint::independence(sn.a(1), sn.b(1));
    int tested = 0;
    for (std::uint32_t bits = 0; bits <= sn.schema.all().bits(); ++bits) {
      AttrSet d = AttrSet::from_bits(bits);
      Constraint target = Constraint::key(d);
      if (upward_contains(sn, target)) {
        EXPECT_THROW(lemma3_model(sn, d), ValidationError);
        continue;
      }
      EXPECT_TRUE(verify_countermodel(lemma3_model(sn, d), sn.sigma.without(dropped_key), target)
                      .ok)
          << sn.schema.format_set(d);
      EXPECT_TRUE(verify_countermodel(lemma4_model(sn, d), sn.sigma.without(dropped_ia), target)
                      .ok)
          << sn.schema.format_set(d);
      ++tested;
    }
    EXPECT_EQ(tested, n == 2 ? 9 : 27);
  }
}

TEST(TwoTupleModels, FrozenContentsAndClaimedViolations) {
  SigmaN s2 = sigma_n(2);
  Lemma5Models l5 = lemma5_models(s2, 1);
  EXPECT_EQ(all_rows(l5.r), (std::vector<std::vector<Value>>{
                                {0, 0, 0, 0}, {0, 1, 1, 0}, {1, 0, 1, 1}, {1, 1, 0, 1}}));
  EXPECT_EQ(all_rows(l5.r_prime),
            (std::vector<std::vector<Value>>{{0, 0, 0, 0}, {1, 0, 1, 0}}));

  Lemma6Models l6 = lemma6_models(s2, 1);
  EXPECT_EQ(all_rows(l6.r0), (std::vector<std::vector<Value>>{{0, 0, 0, 0}, {1, 1, 1, 0}}));
  EXPECT_FALSE(l6.r2.has_value());
  EXPECT_FALSE(l6.r3.has_value());
  EXPECT_TRUE(lemma6_models(s2, 2).r2.has_value());
  EXPECT_FALSE(lemma6_models(s2, 2).r3.has_value());
  EXPECT_THROW(lemma5_models(s2, 0), ValidationError);
  EXPECT_THROW(lemma6_models(s2, 3), ValidationError);

  // The advertised violation pattern, exhaustively at n = 3.
  SigmaN s3 = sigma_n(3);
  ConstraintSet minus_key = s3.sigma.without(Constraint::key(s3.b(3) | s3.a(1)));
  for (int i = 1; i <= 3; ++i) {
    Lemma5Models ms = lemma5_models(s3, i);
    EXPECT_TRUE(satisfies_all(ms.r, minus_key).all_hold);
    EXPECT_TRUE(satisfies_all(ms.r_prime, minus_key).all_hold);
    for (int j = 1; j <= 3; ++j) {
      EXPECT_EQ(satisfies_ia(ms.r, s3.a(i), s3.a(j)).holds(), j > i) << i << "," << j;
      // The companion model additionally breaks constancy of Ai itself, so it
      // only preserves the atoms with j strictly below i.
      EXPECT_EQ(satisfies_ia(ms.r_prime, s3.a(i), s3.a(j)).holds(), j < i) << i << "," << j;
      if (j != i) {
        EXPECT_EQ(satisfies_ia(ms.r, s3.a(i), s3.b(j)).holds(), j < i) << i << "," << j;
        EXPECT_EQ(satisfies_ia(ms.r_prime, s3.a(i), s3.b(j)).holds(), j > i) << i << "," << j;
      }
    }
  }
  ConstraintSet minus_ia = s3.sigma.without(Constraint::independence(s3.a(1), s3.b(1)));
  for (int i = 1; i <= 3; ++i) {
    Lemma6Models ms = lemma6_models(s3, i);
    EXPECT_TRUE(satisfies_all(ms.r0, minus_ia).all_hold);
    EXPECT_TRUE(satisfies_all(ms.r1, minus_ia).all_hold);
    for (int j = 1; j <= 3; ++j) EXPECT_FALSE(satisfies_ia(ms.r0, s3.a(i), s3.a(j)).holds());
    if (i == 2) {
      ASSERT_TRUE(ms.r2.has_value() && ms.r3.has_value());
      EXPECT_TRUE(satisfies_all(*ms.r2, minus_ia).all_hold);
      EXPECT_TRUE(satisfies_all(*ms.r3, minus_ia).all_hold);
      EXPECT_FALSE(satisfies_ia(*ms.r2, s3.a(2), s3.b(1)).holds());
      EXPECT_FALSE(satisfies_ia(*ms.r3, s3.a(2), s3.b(3)).holds());
    }
  }
}

TEST(RemovalCountermodels, DispatchCoversEveryCase) {
  SigmaN s2 = sigma_n(2);
  KaryDemo demo2 = kary_demo(2);
  EXPECT_EQ(demo2.pairs_verified, 68);
  EXPECT_EQ(demo2.arity_bound, 3);
  EXPECT_EQ(demo2.max_model_rows, 24u);
  EXPECT_FALSE(demo2.gap_in_upward_closure);
  EXPECT_TRUE(demo2.chain_proves_gap);
  EXPECT_EQ(demo2.lemma_counts,
            (std::map<std::string, int>{{"lemma3", 18},
                                        {"lemma4", 18},
                                        {"lemma5:r", 12},
                                        {"lemma5:r_prime", 4},
                                        {"lemma6:r0", 12},
                                        {"lemma6:r1", 2},
                                        {"lemma6:r2", 2}}));

  KaryDemo demo3 = kary_demo(3);
  EXPECT_EQ(demo3.pairs_verified, 270);
  EXPECT_EQ(demo3.lemma_counts,
            (std::map<std::string, int>{{"lemma3", 81},
                                        {"lemma4", 81},
                                        {"lemma5:r", 36},
                                        {"lemma5:r_prime", 18},
                                        {"lemma6:r0", 36},
                                        {"lemma6:r1", 6},
                                        {"lemma6:r2", 9},
                                        {"lemma6:r3", 3}}));
  EXPECT_THROW(kary_demo(5), ValidationError);

  // Error paths: psi outside the family, phi inside the closure, wide or
  // empty-sided targets.
  EXPECT_THROW(
      theorem3_countermodel(s2, Constraint::key(s2.a(1)), Constraint::key(s2.a(1) | s2.b(1))),
      ValidationError);
  Constraint psi = Constraint::key(s2.b(2) | s2.a(1));
  EXPECT_THROW(theorem3_countermodel(s2, psi, Constraint::key(s2.b(1) | s2.a(2))),
               ValidationError);
  EXPECT_THROW(
      theorem3_countermodel(s2, psi, Constraint::independence(s2.a(1) | s2.b(1), s2.a(2))),
      ValidationError);
  EXPECT_THROW(theorem3_countermodel(s2, psi, Constraint::independence(AttrSet(), s2.a(1))),
               ValidationError);
}

TEST(RemovalCountermodels, MappedRelationsKeepTheirMeaning) {
  // A rotated hypothesis: dropping key(B1 A2) and violating key(A2 B2).
  SigmaN s2 = sigma_n(2);
  Constraint psi = Constraint::key(s2.b(1) | s2.a(2));
  Constraint phi = Constraint::key(s2.a(2) | s2.b(2));
  Theorem3Result res = theorem3_countermodel(s2, psi, phi);
  EXPECT_EQ(res.lemma, "lemma3");
  EXPECT_TRUE(verify_countermodel(res.relation, s2.sigma.without(psi), phi).ok);
  EXPECT_EQ(res.attr_map.size(), 4u);
  // The attribute map is a permutation.
  std::set<std::string> images;
  for (const auto& [from, to] : res.attr_map) images.insert(to);
  EXPECT_EQ(images.size(), 4u);

  // A reflected target: both sides on the B side of the cycle.
  Constraint atom = Constraint::independence(s2.b(1), s2.b(2));
  Theorem3Result refl = theorem3_countermodel(s2, psi, atom);
  EXPECT_TRUE(verify_countermodel(refl.relation, s2.sigma.without(psi), atom).ok);
}

TEST(CountingChain, ExplainsWhyTheGapKeyHolds) {
  SigmaN s2 = sigma_n(2);
  Relation grid(s2.schema);
  for (Value x = 0; x < 3; ++x)
    for (Value y = 0; y < 2; ++y) grid.append_row({x, y, x, y});
  CountingChain cc = counting_chain(grid, 2);
  EXPECT_EQ(cc.total, 6);
  EXPECT_EQ(cc.a1_card, 3);
  EXPECT_EQ(cc.b_cards, (std::vector<std::int64_t>{2, 2}));
  EXPECT_EQ(cc.a1b1_card, 6);
  EXPECT_TRUE(cc.concludes_key);
  EXPECT_TRUE(cc.direct_check_agrees);

  // Refuses relations that break a hypothesis.
  Relation bad(s2.schema);
  bad.append_row({0, 0, 0, 0});
  bad.append_row({0, 1, 1, 0});
  bad.append_row({1, 0, 1, 1});
  bad.append_row({1, 1, 0, 1});  // ind(A1 ; B1) holds but key(B1 A2) fails
  EXPECT_THROW(counting_chain(bad, 2), ValidationError);
  EXPECT_THROW(counting_chain(Relation(Schema("R", {"X"})), 2), ValidationError);
}

TEST(BoundedSearch, FrozenAnswersAndAgreementWithBruteForce) {
  SigmaN s2 = sigma_n(2);
  Constraint gap = Constraint::key(s2.a(1) | s2.b(1));
  auto hit = bounded_search(s2.sigma.without(Constraint::key(s2.b(2) | s2.a(1))), gap, 2, 2);
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(all_rows(*hit), (std::vector<std::vector<Value>>{{0, 0, 0, 0}, {0, 0, 1, 0}}));
  EXPECT_TRUE(verify_countermodel(*hit, s2.sigma.without(Constraint::key(s2.b(2) | s2.a(1))), gap)
                  .ok);

  EXPECT_FALSE(bounded_search(s2.sigma, gap, 3, 4).has_value());

  // Existence agrees with the naive enumerator over a two-attribute schema.
  Schema s = iakr::testing::letters_schema(2);
  auto pool = iakr::testing::key_unary_pool(s);
  auto queries = iakr::testing::key_unary_queries(s);
  for (const auto& picks : iakr::testing::small_subsets(static_cast<int>(pool.size()), 2)) {
    ConstraintSet cs = iakr::testing::make_sigma(s, pool, picks);
    for (const auto& q : queries) {
      bool naive_found = false;
      iakr::testing::for_each_relation(s, 2, 2, [&](const Relation& r) {
        if (naive_found) return;
        if (satisfies_all(r, cs).all_hold && !satisfies(r, q).holds()) naive_found = true;
      });
      auto smart = bounded_search(cs, q, 2, 2);
      ASSERT_EQ(smart.has_value(), naive_found)
          << print_constraints(cs) << " target " << q.format(s);
      if (smart)
        EXPECT_TRUE(verify_countermodel(*smart, cs, q).ok);
    }
  }
  EXPECT_THROW(bounded_search(s2.sigma, gap, 0, 2), ValidationError);
  EXPECT_THROW(bounded_search(s2.sigma, gap, 9, 2), ValidationError);
}

}  // namespace
}  // namespace iakr
