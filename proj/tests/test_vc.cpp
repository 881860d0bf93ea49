#include <gtest/gtest.h>

#include <random>

#include "recveq/lang/parser.hpp"
#include "recveq/oracle.hpp"
#include "recveq/vc/encoder.hpp"
#include "recveq/vc/sat.hpp"
#include "recveq/vc/solver.hpp"
#include "util.hpp"

using namespace recveq;
using namespace recveq::vc;

namespace {

struct Gen {
  std::mt19937 rng;
  TermManager& tm;
  std::vector<TermId> vars;

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  TermId bv(int depth) {
    if (depth == 0 || pick(4) == 0) {
      if (pick(3) == 0) return tm.mk_const(pick(1 << tm.width()) - (1 << (tm.width() - 1)));
      return vars[static_cast<std::size_t>(pick(static_cast<int>(vars.size())))];
    }
    auto a = bv(depth - 1);
    auto b = bv(depth - 1);
    switch (pick(11)) {
      case 0: return tm.mk_add(a, b);
      case 1: return tm.mk_sub(a, b);
      case 2: return tm.mk_mul(a, b);
      case 3: return tm.mk_sdiv(a, b);
      case 4: return tm.mk_srem(a, b);
      case 5: return tm.mk_neg(a);
      case 6: return tm.mk_bvand(a, b);
      case 7: return tm.mk_bvor(a, b);
      case 8: return tm.mk_bvxor(a, b);
      case 9: return tm.mk_bvnot(a);
      default: return tm.mk_ite(boolean(depth - 1), a, b);
    }
  }

  TermId boolean(int depth) {
    if (depth == 0 || pick(3) == 0) {
      auto a = bv(depth), b = bv(depth);
      switch (pick(3)) {
        case 0: return tm.mk_eq(a, b);
        case 1: return tm.mk_slt(a, b);
        default: return tm.mk_sle(a, b);
      }
    }
    switch (pick(3)) {
      case 0: return tm.mk_and(boolean(depth - 1), boolean(depth - 1));
      case 1: return tm.mk_or(boolean(depth - 1), boolean(depth - 1));
      default: return tm.mk_not(boolean(depth - 1));
    }
  }
};

// Satisfiability by trying every assignment of the free variables.
bool brute_sat(const TermManager& tm, const std::vector<TermId>& f) {
  auto fv = tm.free_vars(f);
  std::vector<std::int64_t> m(tm.vars().size(), 0);
  const std::int64_t lo = bv::min_value(tm.width()), hi = bv::max_value(tm.width());
  std::function<bool(std::size_t)> rec = [&](std::size_t k) {
    if (k == fv.size()) {
      for (auto v : tm.eval_many(f, m))
        if (!v) return false;
      return true;
    }
    for (std::int64_t v = lo; v <= hi; ++v) {
      m[fv[k]] = v;
      if (rec(k + 1)) return true;
    }
    return false;
  };
  return rec(0);
}

CheckResult check_src(const std::string& src, const std::string& entry = "main") {
  auto u = lang::parse(src, {true});
  return check_valid({u, entry});
}

}  // namespace

TEST(Solver, RandomFormulasEnginesAgree) {
  int sat = 0, unsat = 0;
  for (int i = 0; i < 500; ++i) {
    const unsigned width = i % 2 ? 8 : 4;
    TermManager tm(width);
    Gen g{std::mt19937(static_cast<unsigned>(1000 + i)), tm, {}};
    const int nv = 1 + i % 3;
    for (int k = 0; k < nv; ++k) g.vars.push_back(tm.mk_var("x" + std::to_string(k), false));
    std::vector<TermId> f{g.boolean(3)};
    if (i % 4 == 0) f.push_back(g.boolean(2));
    auto e = solve_enumerate(tm, f);
    auto s = solve_satcore(tm, f);
    ASSERT_NE(e.status, SatStatus::Unknown);
    ASSERT_EQ(e.status, s.status) << "formula " << i << ": " << tm.to_string(f[0]);
    if (width == 4) EXPECT_EQ(e.status == SatStatus::Sat, brute_sat(tm, f)) << i;
    if (s.status == SatStatus::Sat) {
      for (auto v : tm.eval_many(f, s.model)) EXPECT_TRUE(v);
      for (auto v : tm.eval_many(f, e.model)) EXPECT_TRUE(v);
      ++sat;
    } else {
      ++unsat;
    }
  }
  EXPECT_GT(sat, 50);
  EXPECT_GT(unsat, 50);
}

TEST(Solver, AutoPicksEnumerateUpTo24Bits) {
  TermManager tm(8);
  auto a = tm.mk_var("a", false), b = tm.mk_var("b", false), c = tm.mk_var("c", false);
  auto r = solve(tm, {tm.mk_eq(tm.mk_add(a, tm.mk_add(b, c)), tm.mk_const(7))});
  EXPECT_EQ(r.free_bits, 24u);
  EXPECT_EQ(r.engine, Engine::Enumerate);
  auto d = tm.mk_var("d", false);
  auto r2 = solve(tm, {tm.mk_eq(tm.mk_add(a, tm.mk_add(b, tm.mk_add(c, d))), tm.mk_const(7))});
  EXPECT_EQ(r2.engine, Engine::SatCore);
  EXPECT_EQ(r2.status, SatStatus::Sat);
}

TEST(BitBlast, OperatorsMatchReferenceAtWidth4) {
  using Mk = TermId (TermManager::*)(TermId, TermId);
  struct Case {
    Mk mk;
    std::int64_t (*ref)(std::int64_t, std::int64_t, unsigned);
  };
  const Case cases[] = {
      {&TermManager::mk_add, bv::add},
      {&TermManager::mk_sub, bv::sub},
      {&TermManager::mk_mul, bv::mul},
      {&TermManager::mk_sdiv, bv::sdiv},
      {&TermManager::mk_srem, bv::srem},
  };
  for (auto& c : cases)
    for (std::int64_t a = -8; a < 8; ++a)
      for (std::int64_t b = -8; b < 8; ++b) {
        TermManager tm(4);
        auto x = tm.mk_var("x", false), y = tm.mk_var("y", false), r = tm.mk_var("r", false);
        std::vector<TermId> f{tm.mk_eq(x, tm.mk_const(a)), tm.mk_eq(y, tm.mk_const(b)), tm.mk_eq(r, (tm.*c.mk)(x, y))};
        auto s = solve_satcore(tm, f);
        ASSERT_EQ(s.status, SatStatus::Sat);
        EXPECT_EQ(s.model[2], c.ref(a, b, 4)) << a << " " << b;
      }
}

TEST(Sat, PigeonholeUnsat) {
  sat::Solver s;
  const int holes = 4, pigeons = 5;
  auto v = [&](int p, int h) { return static_cast<std::uint32_t>(p * holes + h); };
  for (int i = 0; i < holes * pigeons; ++i) s.new_var();
  for (int p = 0; p < pigeons; ++p) {
    std::vector<sat::Lit> c;
    for (int h = 0; h < holes; ++h) c.push_back(sat::mk_lit(v(p, h)));
    s.add_clause(c);
  }
  for (int h = 0; h < holes; ++h)
    for (int p = 0; p < pigeons; ++p)
      for (int q = p + 1; q < pigeons; ++q) s.add_clause({sat::mk_lit(v(p, h), true), sat::mk_lit(v(q, h), true)});
  EXPECT_EQ(s.solve(), sat::Result::Unsat);
}

TEST(Sat, Random3SatAgainstBruteForce) {
  std::mt19937 rng(7);
  for (int round = 0; round < 200; ++round) {
    const int n = 10, m = 30 + round % 25;
    std::vector<std::vector<sat::Lit>> cls;
    for (int i = 0; i < m; ++i) {
      std::vector<sat::Lit> c;
      for (int k = 0; k < 3; ++k) c.push_back(sat::mk_lit(rng() % n, rng() & 1));
      cls.push_back(c);
    }
    sat::Solver s;
    for (int i = 0; i < n; ++i) s.new_var();
    for (auto& c : cls) s.add_clause(c);
    auto r = s.solve();
    bool any = false;
    for (unsigned a = 0; a < (1u << n) && !any; ++a) {
      bool ok = true;
      for (auto& c : cls) {
        bool sat_c = false;
        for (auto l : c) sat_c |= (((a >> sat::var_of(l)) & 1) != 0) != sat::sign_of(l);
        ok &= sat_c;
      }
      any = ok;
    }
    ASSERT_EQ(r == sat::Result::Sat, any) << round;
    if (r == sat::Result::Sat)
      for (auto& c : cls) {
        bool sat_c = false;
        for (auto l : c) sat_c |= s.lit_true(l);
        EXPECT_TRUE(sat_c);
      }
  }
}

TEST(Check, SharedUfMakesSumPremiseValid) {
  auto r = check_src(R"(
int uf(int x);
int main(int n) {
  int a = 0;
  if (n <= 1) a = n; else a = n + uf(n - 1);
  int b = 0;
  if (n <= 1) b = n; else b = uf(n - 1) + n;
  assert(a == b);
  return 0;
}
)");
  EXPECT_EQ(r.verdict, Validity::Valid);
}

TEST(Check, CongruenceNeedsEqualArguments) {
  const char* tmpl = R"(
int g(int x);
int main(int a, int b) {
  %s
  assert(g(a) == g(b));
  return 0;
}
)";
  char buf[256];
  std::snprintf(buf, sizeof buf, tmpl, "assume(a == b);");
  EXPECT_EQ(check_src(buf).verdict, Validity::Valid);
  std::snprintf(buf, sizeof buf, tmpl, "");
  auto r = check_src(buf);
  ASSERT_EQ(r.verdict, Validity::Counterexample);
  EXPECT_NE(r.inputs[0], r.inputs[1]);
  EXPECT_TRUE(r.replay_ok);
}

TEST(Check, CounterexampleReplays) {
  auto r = check_src("int main(int n) { if (n > 100) assert(n < 120); return 0; }");
  ASSERT_EQ(r.verdict, Validity::Counterexample);
  EXPECT_GE(r.inputs[0], 120);
  EXPECT_TRUE(r.replay_ok);
}

TEST(Check, RecursionIsNotFlat) {
  EXPECT_THROW(check_src("int main(int n) { if (n < 1) return 0; return main(n - 1); }"), NotFlat);
}

TEST(Unwind, AgreesWithInterpreterWithinDepth) {
  auto u = testutil::load("fib.mrc");
  for (int uw = 1; uw <= 4; ++uw) {
    auto w = unwind(u, uw);
    for (std::int64_t n = -128; n < 128; ++n) {
      oracle::InterpOptions io;
      io.trace = true;
      io.fuel = 1 << 16;
      auto a = oracle::eval(u, "f1", {n}, io);
      int depth = 0;
      for (auto& t : a.trace) depth = std::max(depth, t.depth);
      io.trace = false;
      auto b = oracle::eval(w, "f1", {n}, io);
      if (!a.terminated()) continue;
      if (depth <= uw) {
        ASSERT_TRUE(b.terminated()) << uw << " " << n;
        EXPECT_EQ(a.values, b.values);
      } else {
        EXPECT_EQ(b.status, oracle::Status::Blocked) << uw << " " << n;
      }
    }
  }
}

TEST(Smt, EmitsDeclarationsAndCheckSat) {
  auto u = lang::parse("int g(int x); int main(int n) { assert(g(n) == g(n + 0)); return 0; }", {true});
  auto text = emit_smtlib(encode_flat({u, "main"}, 32));
  EXPECT_NE(text.find("(check-sat)"), std::string::npos);
  EXPECT_NE(text.find("declare-fun"), std::string::npos);
  EXPECT_NE(text.find("(_ BitVec 32)"), std::string::npos);
}
