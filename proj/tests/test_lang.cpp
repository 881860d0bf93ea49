#include <gtest/gtest.h>

#include "recveq/common.hpp"
#include "recveq/lang/loops.hpp"
#include "recveq/lang/parser.hpp"
#include "recveq/lang/printer.hpp"
#include "recveq/lang/typecheck.hpp"
#include "recveq/oracle.hpp"
#include "util.hpp"

using namespace recveq;
using namespace recveq::lang;

namespace {

std::string kind_of(const std::string& src) {
  try {
    typecheck(parse(src));
  } catch (const FrontendError& e) {
    return e.kind();
  }
  return "";
}

int count_returns(const StmtPtr& s) {
  if (!s) return 0;
  if (auto* b = std::get_if<Block>(&s->node)) {
    int n = 0;
    for (auto& x : b->stmts) n += count_returns(x);
    return n;
  }
  if (auto* i = std::get_if<If>(&s->node)) return count_returns(i->then_branch) + count_returns(i->else_branch);
  if (auto* w = std::get_if<While>(&s->node)) return count_returns(w->body);
  return std::holds_alternative<Return>(s->node) ? 1 : 0;
}

bool any_loop(const SourceUnit& u) {
  for (auto& f : u.functions)
    if (has_loops(f)) return true;
  return false;
}

}  // namespace

TEST(Parse, SumShape) {
  auto u = testutil::load("sum.mrc");
  ASSERT_EQ(u.functions.size(), 2u);
  const auto& f = u.functions[0];
  EXPECT_EQ(f.name, "sum1");
  EXPECT_EQ(f.params, std::vector<std::string>{"n"});
  EXPECT_EQ(count_returns(f.body), 2);
}

TEST(Parse, PrintRoundTripsOnCorpus) {
  for (auto file : {"sum.mrc", "fib.mrc", "mode.mrc", "redundant.mrc", "pascal.mrc", "loops.mrc", "main1.mrc",
                    "main2.mrc"}) {
    auto u = testutil::load(file);
    auto once = print(u);
    EXPECT_EQ(print(parse(once)), once) << file;
  }
}

TEST(Parse, SyntaxErrorHasPosition) {
  try {
    parse("int f(int n) {\n  return n +;\n}\n");
    FAIL();
  } catch (const FrontendError& e) {
    EXPECT_EQ(e.kind(), "SyntaxError");
    EXPECT_EQ(e.line(), 2);
    EXPECT_GT(e.column(), 0);
  }
}

TEST(Parse, ReservedNamesRejected) {
  try {
    parse("int __rv_x(int n) { return n; }");
    FAIL();
  } catch (const FrontendError& e) {
    EXPECT_EQ(e.kind(), "ReservedIdentifier");
  }
  EXPECT_NO_THROW(parse("int __rv_x(int n) { return n; }", {true}));
}

TEST(Parse, InternalConstructsNeedFlag) {
  const char* src = "int f(int n) { assume(n > 0); return nondet(); }";
  EXPECT_THROW(parse(src), FrontendError);
  EXPECT_NO_THROW(parse(src, {true}));
}

TEST(Parse, BitAndBindsLooserThanEquality) {
  auto e = parse_expr("n & 1 == 0");
  EXPECT_FALSE(oracle::holds(e, {"n"}, {2}));
  EXPECT_TRUE(oracle::holds(parse_expr("(n & 1) == 0"), {"n"}, {2}));
  EXPECT_EQ(print(parse_expr(print(e))), print(e));
}

TEST(Typecheck, Errors) {
  EXPECT_EQ(kind_of("int f(int n) { if (n) return 1; }"), "MissingReturn");
  EXPECT_EQ(kind_of("int f(int n) { return g(n); }"), "UndefinedCallee");
  EXPECT_EQ(kind_of("int f(int n) { return f(n, n); }"), "ArityMismatch");
  EXPECT_EQ(kind_of("int f(int n) { return m; }"), "UndefinedVariable");
  EXPECT_EQ(kind_of("int f(int n) { return 0; } int f(int m) { return 1; }"), "DuplicateName");
  EXPECT_EQ(kind_of("int f(int n) { return g(n); } int g(int n) { return f(n); }"), "MutualRecursionUnsupported");
  EXPECT_EQ(kind_of("int g(int x); int f(int n) { return g(n) + f(n - 1); }"), "");
}

TEST(CallGraph, BottomUp) {
  auto u = testutil::load("main1.mrc");
  auto g = call_graph(u);
  EXPECT_TRUE(g.is_recursive("sum1"));
  EXPECT_FALSE(g.is_recursive("main1"));
  auto pos = [&](const std::string& n) { return std::find(g.bottom_up.begin(), g.bottom_up.end(), n); };
  EXPECT_LT(pos("sum1"), pos("main1"));
}

TEST(CallSites, NumberedInTextualOrder) {
  auto u = testutil::load("fib.mrc");
  auto sites = recursive_call_sites(*u.find("f2"));
  ASSERT_EQ(sites.size(), 3u);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(sites[static_cast<std::size_t>(k)].site_index, k);
  EXPECT_EQ(print(sites[2].args[0]), "n - 3");
}

TEST(Loops, NoLoopRemains) {
  auto u = testutil::load("loops.mrc");
  ASSERT_TRUE(any_loop(u));
  auto r = loops_to_recursion(u);
  EXPECT_FALSE(any_loop(r));
  EXPECT_NO_THROW(typecheck(r));
}

TEST(Loops, PreserveBehaviourOnFullSweep) {
  auto u = testutil::load("loops.mrc");
  auto r = loops_to_recursion(u);
  oracle::DomainSpec d;
  d.fuel = 1 << 12;
  for (auto& f : u.functions) {
    if (f.params.size() > 1) d.ranges.assign(f.params.size(), {-40, 40});
    else d.ranges.clear();
    std::size_t diffs = 0, n = 0;
    oracle::for_each_input(f.params.size(), d, [&](const std::vector<std::int64_t>& in) {
      oracle::InterpOptions io;
      io.fuel = d.fuel;
      auto a = oracle::eval(u, f.name, in, io);
      io.fuel = d.fuel * 4;  // the loop helpers enter one frame per iteration
      auto b = oracle::eval(r, f.name, in, io);
      ++n;
      if (a.terminated() && (!b.terminated() || a.values != b.values)) ++diffs;
      return true;
    });
    EXPECT_EQ(diffs, 0u) << f.name << " over " << n << " inputs";
  }
}
