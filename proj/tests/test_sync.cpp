#include <gtest/gtest.h>

#include <algorithm>

#include "recveq/lang/parser.hpp"
#include "recveq/pathex.hpp"
#include "recveq/prover.hpp"
#include "recveq/sync.hpp"
#include "util.hpp"

using namespace recveq;
using namespace recveq::sync;

namespace {

using Tuples = std::vector<std::vector<std::int64_t>>;

Tuples sorted(Tuples t) {
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

SyncResult search(const std::string& file, const std::string& a, const std::string& b, int max_uw) {
  auto u = testutil::load(file);
  auto ctx = prover::make_pair_context(u, a, b).unit;
  Options o;
  o.max_uw = max_uw;
  return find_sync_unrolling(ctx, a, b, pathex::natural_base_case_precondition(u, a),
                             pathex::natural_base_case_precondition(u, b), o);
}

}  // namespace

TEST(Sync, FibSkipLevel) {
  auto r = search("fib.mrc", "f1", "f2", 6);
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.su.side[0],
            UnrollTree::node({UnrollTree::node({UnrollTree::leaf(), UnrollTree::leaf()}), UnrollTree::leaf()}));
  EXPECT_TRUE(r.su.side[1].is_identity());
  auto u = testutil::load("fib.mrc");
  auto l1 = leaf_tuples(u, "f1", r.su.side[0], r.witness.input);
  auto l2 = leaf_tuples(u, "f2", r.su.side[1], r.witness.input);
  ASSERT_TRUE(l1 && l2);
  EXPECT_EQ(sorted(*l1), sorted(*l2));
  const auto n = r.witness.input[0];
  EXPECT_EQ(sorted(*l1), (Tuples{{n - 3}, {n - 2}}));
}

TEST(Sync, LeafSetsAgreeOnASweepForFib) {
  auto u = testutil::load("fib.mrc");
  auto r = search("fib.mrc", "f1", "f2", 6);
  ASSERT_TRUE(r.found);
  for (std::int64_t n = 4; n < 120; ++n) {
    auto l1 = leaf_tuples(u, "f1", r.su.side[0], {n});
    auto l2 = leaf_tuples(u, "f2", r.su.side[1], {n});
    ASSERT_TRUE(l1 && l2);
    EXPECT_EQ(sorted(*l1), sorted(*l2)) << n;
  }
}

TEST(Sync, RedundantCallsSyncWhenUnrestricted) {
  auto r = search("redundant.mrc", "t1", "t2", 4);
  ASSERT_TRUE(r.found);
  auto u = testutil::load("redundant.mrc");
  for (std::int64_t n = 5; n < 60; ++n) {
    auto l1 = leaf_tuples(u, "t1", r.su.side[0], {n});
    auto l2 = leaf_tuples(u, "t2", r.su.side[1], {n});
    ASSERT_TRUE(l1 && l2);
    EXPECT_EQ(sorted(*l1), sorted(*l2)) << n;
  }
}

TEST(Sync, RedundantCallsRestrictedToOneParityHaveNoSync) {
  auto u = testutil::load("redundant.mrc");
  auto ctx = prover::make_pair_context(u, "t1", "t2").unit;
  auto rho1 = pathex::natural_base_case_precondition(u, "t1");
  auto rho2 = pathex::natural_base_case_precondition(u, "t2");
  auto even = lang::parse_expr("n % 2 == 0 || n < 3");
  ctx.put(transforms::add_assumption(*ctx.find("t2"), even, true));
  Options o;
  o.max_uw = 4;
  auto r = find_sync_unrolling(ctx, "t1", "t2", rho1, rho2, o);
  EXPECT_FALSE(r.found);
  EXPECT_EQ(r.reason, NotFoundReason::ProvedImpossibleUpTo);
}

TEST(Sync, JsonRoundTrip) {
  SyncUnrolling su;
  su.side[0] = UnrollTree::node({UnrollTree::node({UnrollTree::leaf(), UnrollTree::leaf()}), UnrollTree::leaf()});
  su.side[1] = UnrollTree::node({UnrollTree::leaf(), UnrollTree::leaf(), UnrollTree::leaf()});
  auto back = from_json(to_json(su));
  EXPECT_EQ(back.side[0], su.side[0]);
  EXPECT_EQ(back.side[1], su.side[1]);
  EXPECT_NE(to_text(su, "f1", "f2").find("f1"), std::string::npos);
}

TEST(Witness, TreeFromFrames) {
  std::vector<WitnessFrame> fr{{0, -1, false, {5}}, {1, 0, false, {4}}, {2, 0, true, {3}},
                               {2, 1, true, {2}},   {1, 1, true, {3}}};
  auto t = tree_from_frames(fr, 2);
  EXPECT_EQ(t, UnrollTree::node({UnrollTree::node({UnrollTree::leaf(), UnrollTree::leaf()}), UnrollTree::leaf()}));
}

TEST(Witness, InconsistentFramesRejected) {
  std::vector<WitnessFrame> twice{{0, -1, false, {5}}, {1, 0, true, {4}}, {1, 0, true, {4}}};
  EXPECT_THROW(tree_from_frames(twice, 2), InconsistentWitness);
  std::vector<WitnessFrame> orphan{{0, -1, false, {5}}, {2, 0, true, {4}}};
  EXPECT_THROW(tree_from_frames(orphan, 2), InconsistentWitness);
  std::vector<WitnessFrame> bad_site{{0, -1, false, {5}}, {1, 3, true, {4}}};
  EXPECT_THROW(tree_from_frames(bad_site, 2), InconsistentWitness);
  std::vector<WitnessFrame> leaf_root{{0, -1, true, {5}}};
  EXPECT_THROW(tree_from_frames(leaf_root, 2), InconsistentWitness);
}

TEST(Prune, KeepsLeafEquality) {
  auto u = testutil::load("fib.mrc");
  SyncUnrolling su;
  su.side[0] = UnrollTree::node({UnrollTree::node({UnrollTree::leaf(), UnrollTree::leaf()}), UnrollTree::leaf()});
  su.side[1] = UnrollTree::node({UnrollTree::leaf(), UnrollTree::leaf(), UnrollTree::leaf()});
  auto p = prune(u, "f1", "f2", su, {10});
  EXPECT_EQ(p.side[0], su.side[0]);
  EXPECT_EQ(p.side[1], su.side[1]);
}
