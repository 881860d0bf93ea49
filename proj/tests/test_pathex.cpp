#include <gtest/gtest.h>

#include "recveq/lang/parser.hpp"
#include "recveq/lang/printer.hpp"
#include "recveq/oracle.hpp"
#include "recveq/pathex.hpp"
#include "recveq/transforms.hpp"
#include "util.hpp"

using namespace recveq;
using transforms::UnrollTree;

namespace {

void sweep(std::size_t arity, const std::function<void(const std::vector<std::int64_t>&)>& fn) {
  oracle::for_each_input(arity, {}, [&](const std::vector<std::int64_t>& in) {
    fn(in);
    return true;
  });
}

transforms::Instrumented instrument(const lang::SourceUnit& u, const std::string& fn, const UnrollTree& t) {
  auto clones = transforms::apply_unrolling(*u.find(fn), t);
  return transforms::instrument_bc_flag(clones, fn, pathex::natural_base_case_precondition(u, fn));
}

UnrollTree unroll_first_call() { return UnrollTree::node({UnrollTree::node({UnrollTree::leaf(), UnrollTree::leaf()}), UnrollTree::leaf()}); }

}  // namespace

TEST(Paths, PartitionTheDomain) {
  for (auto& c : testutil::kRecursive) {
    auto u = testutil::load(c.file);
    const auto& f = *u.find(c.fn);
    auto paths = pathex::get_all_paths(u, c.fn);
    std::size_t bad = 0, wrong_kind = 0;
    sweep(f.params.size(), [&](const std::vector<std::int64_t>& in) {
      int hits = 0;
      bool rec = false;
      for (auto& p : paths)
        if (oracle::holds(p.pred, f.params, in)) {
          ++hits;
          rec = p.recursive;
        }
      if (hits != 1) ++bad;
      // with one frame of fuel the run finishes iff the path makes no call
      auto r = oracle::eval(u, c.fn, in, {8, 1});
      if (rec != (r.status == oracle::Status::NonTermination)) ++wrong_kind;
    });
    EXPECT_EQ(bad, 0u) << c.fn;
    EXPECT_EQ(wrong_kind, 0u) << c.fn;
  }
}

TEST(Paths, H2HasFourPredicates) {
  auto u = testutil::load("fib.mrc");
  auto paths = pathex::get_all_paths(u, "h2");
  ASSERT_EQ(paths.size(), 4u);
  int rec = 0;
  for (auto& p : paths) rec += p.recursive;
  EXPECT_EQ(rec, 2);
}

TEST(Paths, BudgetExceeded) {
  auto u = testutil::load("fib.mrc");
  pathex::Options o;
  o.path_bound = 2;
  EXPECT_THROW(pathex::get_all_paths(u, "h2", o), PathBudgetExceeded);
}

TEST(BaseCase, RhoOfF1IsNBelow3) {
  auto u = testutil::load("fib.mrc");
  auto rho = pathex::natural_base_case_precondition(u, "f1");
  sweep(1, [&](const std::vector<std::int64_t>& in) {
    EXPECT_EQ(oracle::holds(rho, {"n"}, in), in[0] < 3) << in[0];
  });
}

TEST(BaseCase, BcpcOfUnrolledF1IsNAtMost3) {
  auto u = testutil::load("fib.mrc");
  auto ins = instrument(u, "f1", unroll_first_call());
  auto bcpc = pathex::base_case_precondition(ins);
  sweep(1, [&](const std::vector<std::int64_t>& in) {
    EXPECT_EQ(oracle::holds(bcpc, ins.params, in), in[0] <= 3) << in[0];
  });
  EXPECT_EQ(lang::print(pathex::interval_form(bcpc, ins.params, 8)), ins.params[0] + " <= 3");
}

TEST(BaseCase, BcpcMatchesInstrumentedRuns) {
  const std::vector<UnrollTree> trees = {
      UnrollTree::leaf(),
      UnrollTree::node({UnrollTree::leaf(), UnrollTree::leaf()}),
      unroll_first_call(),
      UnrollTree::node({UnrollTree::leaf(), UnrollTree::node({UnrollTree::leaf(), UnrollTree::leaf()})}),
  };
  for (auto fn : {"f1", "h1", "sum1"}) {
    auto u = testutil::load(std::string(fn) == "sum1" ? "sum.mrc" : "fib.mrc");
    const std::size_t sites = std::string(fn) == "sum1" ? 1 : 2;
    for (auto& t : trees) {
      if (t.expand && t.children.size() != sites) continue;
      auto ins = instrument(u, fn, t);
      auto bcpc = pathex::base_case_precondition(ins);
      std::size_t bad = 0;
      sweep(1, [&](const std::vector<std::int64_t>& in) {
        auto r = oracle::eval(ins.unit, ins.entry, in, {8, 1 << 16});
        if (oracle::holds(bcpc, ins.params, in) != (r.status == oracle::Status::Value)) ++bad;
      });
      EXPECT_EQ(bad, 0u) << fn << " height " << t.height();
    }
  }
}

TEST(BaseCase, FalseRhoNeverSetsFlag) {
  auto u = testutil::load("fib.mrc");
  auto clones = transforms::apply_unrolling(*u.find("f1"), UnrollTree::leaf());
  auto ins = transforms::instrument_bc_flag(clones, "f1", lang::parse_expr("0"));
  auto bcpc = pathex::base_case_precondition(ins);
  sweep(1, [&](const std::vector<std::int64_t>& in) { EXPECT_FALSE(oracle::holds(bcpc, ins.params, in)); });
}

TEST(Symexec, ProvesBoundedProperty) {
  auto u = testutil::load("fib.mrc");
  u.put(lang::parse("int __rv_main(int n) { assume(n < 6); assert(f1(n) == f2(n)); return 0; }", {true})
            .functions[0]);
  auto r = pathex::symexec_equiv({u, "__rv_main"});
  EXPECT_EQ(r.verdict, pathex::SymVerdict::Proven);
}

TEST(Symexec, RefutesWithReplayableInput) {
  auto u = testutil::load("fib.mrc");
  u.put(lang::parse("int __rv_main(int n) { assume(n < 8); assert(f1(n) != 5); return 0; }", {true}).functions[0]);
  auto r = pathex::symexec_equiv({u, "__rv_main"});
  ASSERT_EQ(r.verdict, pathex::SymVerdict::Refuted);
  EXPECT_EQ(r.input, std::vector<std::int64_t>{5});
  EXPECT_TRUE(r.replay_ok);
}

TEST(Symexec, DepthBoundGivesInconclusive) {
  auto u = testutil::load("pascal.mrc");
  u.put(lang::parse("int __rv_main(int n, int m) { assert(p1(n, m) == p2(n, m)); return 0; }", {true})
            .functions[0]);
  pathex::Options o;
  o.depth_bound = 4;
  auto r = pathex::symexec_equiv({u, "__rv_main"}, o);
  EXPECT_EQ(r.verdict, pathex::SymVerdict::Inconclusive);
}
