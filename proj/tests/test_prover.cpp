#include <gtest/gtest.h>

#include <fstream>
#include <nlohmann/json.hpp>

#include "recveq/lang/parser.hpp"
#include "recveq/lang/typecheck.hpp"
#include "recveq/oracle.hpp"
#include "recveq/prover.hpp"
#include "util.hpp"

using namespace recveq;
using namespace recveq::prover;

namespace {

ProofOutcome prove(const std::string& file, const std::string& a, const std::string& b, Options o = {}) {
  auto u = testutil::load(file);
  return prove_pair(make_pair_context(u, a, b), o);
}

lang::SourceUnit unit_of(const std::string& src) {
  auto u = lang::parse(src);
  lang::typecheck(u);
  return u;
}

}  // namespace

TEST(Corpus, ManifestVerdicts) {
  std::ifstream in(testutil::corpus("manifest.json"));
  auto m = nlohmann::json::parse(in);
  ASSERT_EQ(m["schema"], 1);
  for (auto& c : m["cases"]) {
    auto o = prove(c["file"], c["f1"], c["f2"]);
    EXPECT_EQ(to_string(o.verdict), c["expected"].get<std::string>()) << c["file"] << " " << o.detail;
    if (c.contains("reason")) EXPECT_EQ(to_string(o.reason), c["reason"].get<std::string>()) << c["file"];
  }
}

TEST(Pair, SumInSyncNeedsOnlyBasic) {
  auto o = prove("sum.mrc", "sum1", "sum2");
  EXPECT_EQ(o.verdict, Verdict::Equivalent);
  EXPECT_EQ(o.strategy, "part-eq");
}

TEST(Pair, FibUsesFullPipeline) {
  auto o = prove("fib.mrc", "f1", "f2");
  ASSERT_EQ(o.verdict, Verdict::Equivalent);
  EXPECT_EQ(o.strategy, "full-part-eq");
  for (auto& pp : o.path_pairs)
    if (pp.feasible && !pp.mixed && pp.su) EXPECT_EQ(pp.step, "Valid");
}

TEST(Pair, WithoutEscalationFibIsNotProven) {
  Options o;
  o.escalate = false;
  o.refute = false;
  EXPECT_EQ(prove("fib.mrc", "f1", "f2", o).verdict, Verdict::NotProven);
}

TEST(Pair, DifferentFunctionsAreRefuted) {
  auto u = unit_of(R"(
int a(int n) { if (n <= 1) return n; return n + a(n - 1); }
int b(int n) { if (n <= 1) return n; return n + b(n - 1) + (n == 40); }
)");
  auto o = prove_pair(make_pair_context(u, "a", "b"));
  ASSERT_EQ(o.verdict, Verdict::NotEquivalent);
  ASSERT_TRUE(o.witness);
  auto r1 = oracle::eval(u, "a", *o.witness), r2 = oracle::eval(u, "b", *o.witness);
  ASSERT_TRUE(r1.terminated() && r2.terminated());
  EXPECT_NE(r1.value(), r2.value());
  EXPECT_EQ(r1.value(), o.v1);
  EXPECT_EQ(r2.value(), o.v2);
}

TEST(Pair, ArityMismatchIsFrontendLevel) {
  auto u = unit_of("int a(int n) { return n; } int b(int n, int m) { return n; }");
  EXPECT_THROW(part_eq_task(make_pair_context(u, "a", "b")), TransformError);
}

TEST(Mutants, VerdictsAreSound) {
  const char* base = "int s(int n) { if (n <= 1) return n; return n + s(n - 1); }\n";
  const char* mutants[] = {
      "int t(int n) { if (n <= 1) return n; return n + t(n - 1); }",
      "int t(int n) { if (n <= 2) return n; return n + t(n - 1); }",
      "int t(int n) { if (n < 1) return n; return n + t(n - 1); }",
      "int t(int n) { if (n <= 1) return n + 1; return n + t(n - 1); }",
      "int t(int n) { if (n <= 1) return n; return n - t(n - 1); }",
      "int t(int n) { if (n <= 1) return n; return t(n - 1) + n; }",
      "int t(int n) { if (n <= 1) return n; return n + t(n - 2); }",
      "int t(int n) { if (n <= 1) return 0; return n + t(n - 1); }",
      "int t(int n) { if (n <= 1) return n; return n * t(n - 1); }",
      "int t(int n) { int r; if (n <= 1) return n; r = t(n - 1); return r + n; }",
  };
  for (auto m : mutants) {
    auto u = unit_of(std::string(base) + m);
    auto o = prove_pair(make_pair_context(u, "s", "t"));
    auto truth = oracle::brute_force_equiv(u, "s", u, "t");
    if (o.verdict == Verdict::Equivalent) EXPECT_TRUE(truth.equivalent) << m;
    if (o.verdict == Verdict::NotEquivalent) {
      ASSERT_TRUE(o.witness);
      auto r1 = oracle::eval(u, "s", *o.witness), r2 = oracle::eval(u, "t", *o.witness);
      EXPECT_TRUE(r1.terminated() && r2.terminated() && r1.value() != r2.value()) << m;
    }
    if (!truth.equivalent) EXPECT_EQ(o.verdict, Verdict::NotEquivalent) << m;
  }
}

TEST(Programs, MainsAreEquivalent) {
  auto u1 = testutil::load("main1.mrc"), u2 = testutil::load("main2.mrc");
  auto r = prove_programs(u1, u2, {{"main1", "main2"}, {"sum1", "sum2"}});
  ASSERT_EQ(r.pairs.size(), 2u);
  EXPECT_EQ(r.pairs[0].name1, "sum1");
  for (auto& p : r.pairs) EXPECT_EQ(p.outcome.verdict, Verdict::Equivalent) << p.name1;
  EXPECT_EQ(exit_code(r), 0);
}

TEST(Programs, UnprovenCalleeBlocksCaller) {
  auto redundant = testutil::load("redundant.mrc");
  auto u1 = redundant, u2 = redundant;
  u1.put(lang::parse("int g1(int x) { return t1(x) + 1; }").functions[0]);
  u2.put(lang::parse("int g2(int x) { return 1 + t2(x); }").functions[0]);
  Options o;
  o.max_uw = 3;
  auto r = prove_programs(u1, u2, {{"g1", "g2"}, {"t1", "t2"}}, o);
  ASSERT_EQ(r.pairs.size(), 2u);
  EXPECT_EQ(r.pairs[0].outcome.verdict, Verdict::NotProven);
  EXPECT_EQ(r.pairs[1].outcome.reason, Reason::CalleeUnproven);
  EXPECT_EQ(exit_code(r), 1);
}

TEST(Report, JsonSchema) {
  auto u1 = testutil::load("main1.mrc"), u2 = testutil::load("main2.mrc");
  auto r = prove_programs(u1, u2, {{"main1", "main2"}, {"sum1", "sum2"}});
  auto j = nlohmann::json::parse(to_json(r));
  EXPECT_EQ(j["schema"], 1);
  ASSERT_EQ(j["pairs"].size(), 2u);
  for (auto& p : j["pairs"]) {
    for (auto key : {"names", "verdict", "reason", "strategy", "trail", "path_pairs"}) EXPECT_TRUE(p.contains(key)) << key;
  }
  EXPECT_NE(summary_table(r).find("Equivalent"), std::string::npos);
}

TEST(Report, ExitCodes) {
  EquivalenceReport r;
  r.pairs.push_back({"a", "b", {}});
  r.pairs[0].outcome.verdict = Verdict::Equivalent;
  EXPECT_EQ(exit_code(r), 0);
  r.pairs.push_back({"c", "d", {}});
  r.pairs[1].outcome.verdict = Verdict::Inconclusive;
  EXPECT_EQ(exit_code(r), 1);
  r.pairs[1].outcome.verdict = Verdict::NotEquivalent;
  EXPECT_EQ(exit_code(r), 2);
}
