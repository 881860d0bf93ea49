#include <gtest/gtest.h>

#include <random>

#include "recveq/common.hpp"
#include "recveq/lang/parser.hpp"
#include "recveq/lang/printer.hpp"
#include "recveq/lang/typecheck.hpp"
#include "recveq/oracle.hpp"
#include "recveq/transforms.hpp"
#include "util.hpp"

using namespace recveq;
using namespace recveq::transforms;

namespace {

UnrollTree random_tree(std::mt19937& rng, std::size_t sites, int depth) {
  if (depth == 0 || rng() % 3 == 0) return UnrollTree::leaf();
  std::vector<UnrollTree> kids;
  for (std::size_t i = 0; i < sites; ++i) kids.push_back(random_tree(rng, sites, depth - 1));
  return UnrollTree::node(std::move(kids));
}

lang::SourceUnit with_clones(lang::SourceUnit u, const std::vector<FunctionDef>& clones) {
  for (auto& c : clones) u.put(c);
  return u;
}

oracle::DomainSpec domain_for(std::size_t arity) {
  oracle::DomainSpec d;
  if (arity > 1) d.ranges.assign(arity, {-48, 47});
  return d;
}

}  // namespace

TEST(Unroll, ClonesArePreOrder) {
  auto u = testutil::load("fib.mrc");
  auto t = UnrollTree::node({UnrollTree::node({UnrollTree::leaf(), UnrollTree::leaf()}), UnrollTree::leaf()});
  auto clones = apply_unrolling(*u.find("f1"), t);
  ASSERT_EQ(clones.size(), 2u);
  EXPECT_EQ(clones[0].name, "f1");
  EXPECT_EQ(clones[1].name, "f1_");
  EXPECT_EQ(t.height(), 2);
  EXPECT_EQ(t.expanded_count(), 2u);
  EXPECT_FALSE(t.is_identity());
  EXPECT_TRUE(UnrollTree::node({UnrollTree::leaf(), UnrollTree::leaf()}).is_identity());
}

TEST(Unroll, WrongChildCountIsArityMismatch) {
  auto u = testutil::load("sum.mrc");
  try {
    apply_unrolling(*u.find("sum1"), UnrollTree::node({UnrollTree::leaf(), UnrollTree::leaf()}));
    FAIL();
  } catch (const recveq::TransformError& e) {
    EXPECT_EQ(e.kind(), "ArityMismatch");
  }
}

TEST(Unroll, PreservesBehaviourOnRandomTrees) {
  std::mt19937 rng(11);
  for (auto& c : testutil::kRecursive) {
    auto u = testutil::load(c.file);
    const auto& f = *u.find(c.fn);
    const auto sites = lang::recursive_call_sites(f).size();
    for (int k = 0; k < 4; ++k) {
      auto t = random_tree(rng, sites, 2);
      auto clones = apply_unrolling(f, t);
      auto uu = with_clones(u, clones);
      std::size_t diffs = 0;
      oracle::for_each_input(f.params.size(), domain_for(f.params.size()), [&](const std::vector<std::int64_t>& in) {
        auto a = oracle::eval(u, c.fn, in, {8, 256});
        auto b = oracle::eval(uu, c.fn, in, {8, 256});
        if (a.terminated() && b.terminated() && a.values != b.values) ++diffs;
        if (a.terminated() != b.terminated()) ++diffs;
        return true;
      });
      EXPECT_EQ(diffs, 0u) << c.fn << " tree height " << t.height();
    }
  }
}

TEST(Substitute, Modes) {
  auto u = testutil::load("sum.mrc");
  const auto& f = *u.find("sum1");

  auto g = substitute_calls(f, {"sum1"}, SubstitutionMode::ret_zero());
  lang::SourceUnit a;
  a.put(g);
  add_stub(a, SubstitutionMode::ret_zero(), 1);
  EXPECT_EQ(oracle::eval(a, "sum1", {5}).value(), 5);
  EXPECT_EQ(oracle::eval(a, "sum1", {1}).value(), 1);

  auto h = substitute_calls(f, {"sum1"}, SubstitutionMode::assume_false());
  lang::SourceUnit b;
  b.put(h);
  add_stub(b, SubstitutionMode::assume_false(), 1);
  EXPECT_EQ(oracle::eval(b, "sum1", {5}).status, oracle::Status::Blocked);
  EXPECT_EQ(oracle::eval(b, "sum1", {0}).status, oracle::Status::Value);

  auto k = substitute_calls(f, {"sum1"}, SubstitutionMode::uf("UF"));
  lang::SourceUnit c;
  c.put(k);
  add_stub(c, SubstitutionMode::uf("UF"), 1);
  ASSERT_NE(c.find_uf("UF"), nullptr);
  EXPECT_EQ(lang::print(c).find("sum1(n"), std::string::npos);
}

TEST(Assume, ReplaceKeepsOne) {
  auto u = testutil::load("sum.mrc");
  auto f = *u.find("sum1");
  f = add_assumption(f, lang::parse_expr("n < 10"), false);
  f = add_assumption(f, lang::parse_expr("n > -10"), false);
  EXPECT_EQ(count_engine_assumptions(f), 2u);
  f = add_assumption(f, lang::parse_expr("n < 5"), true);
  EXPECT_EQ(count_engine_assumptions(f), 1u);
  lang::SourceUnit v;
  v.put(f);
  EXPECT_EQ(oracle::eval(v, "sum1", {4}).value(), 10);
  EXPECT_EQ(oracle::eval(v, "sum1", {7}).status, oracle::Status::Blocked);
  // every frame is checked, so a call that leaves the range blocks too
  auto g = add_assumption(*u.find("sum1"), lang::parse_expr("n > 3"), true);
  lang::SourceUnit w;
  w.put(g);
  EXPECT_EQ(oracle::eval(w, "sum1", {6}).status, oracle::Status::Blocked);
}

TEST(Assume, FreeVariableRejected) {
  auto u = testutil::load("sum.mrc");
  try {
    add_assumption(*u.find("sum1"), lang::parse_expr("m < 3"), false);
    FAIL();
  } catch (const recveq::TransformError& e) {
    EXPECT_EQ(e.kind(), "FreeVariable");
  }
}

TEST(Instrument, FlagWrapperBlocksWithoutBaseCase) {
  auto u = testutil::load("sum.mrc");
  auto clones = apply_unrolling(*u.find("sum1"), UnrollTree::node({UnrollTree::leaf()}));
  auto ins = instrument_bc_flag(clones, "sum1", lang::parse_expr("n <= 1"));
  EXPECT_EQ(ins.params.size(), 1u);
  EXPECT_EQ(oracle::eval(ins.unit, ins.entry, {1}).status, oracle::Status::Value);
  // the only recursive call is a leaf, so rho is never evaluated below the root
  EXPECT_EQ(oracle::eval(ins.unit, ins.entry, {2}).status, oracle::Status::Blocked);
}
