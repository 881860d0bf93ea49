#include "recveq/vc/solver.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>

#include "recveq/common.hpp"
#include "recveq/vc/bitblast.hpp"

namespace recveq::vc {

namespace {

BackendStats g_stats;
bool g_differential = false;
std::string g_cnf_dir;

std::int64_t apply(Op op, std::int64_t a, std::int64_t b, std::int64_t c, unsigned w) {
  switch (op) {
    case Op::Not: return !a;
    case Op::And: return a && b;
    case Op::Or: return a || b;
    case Op::Eq: return a == b;
    case Op::Slt: return a < b;
    case Op::Sle: return a <= b;
    case Op::BoolIte:
    case Op::Ite: return a ? b : c;
    case Op::Add: return bv::add(a, b, w);
    case Op::Sub: return bv::sub(a, b, w);
    case Op::Mul: return bv::mul(a, b, w);
    case Op::SDiv: return bv::sdiv(a, b, w);
    case Op::SRem: return bv::srem(a, b, w);
    case Op::Neg: return bv::neg(a, w);
    case Op::BvAnd: return a & b;
    case Op::BvOr: return a | b;
    case Op::BvXor: return a ^ b;
    case Op::BvNot: return bv::wrap(~a, w);
    default: return 0;
  }
}

struct Instr {
  Op op;
  std::uint32_t dst, a, b, c;
};

// Operand of a lane-wise instruction: a lane array or a broadcast scalar.
struct Src {
  const std::int64_t* p;
  std::size_t stride;
  std::int64_t operator[](std::size_t j) const { return p[j * stride]; }
};

template <class F>
void lanes(std::int64_t* dst, std::size_t n, F f) {
  for (std::size_t j = 0; j < n; ++j) dst[j] = f(j);
}

void apply_lanes(Op op, std::int64_t* d, Src a, Src b, Src c, std::size_t n, unsigned w) {
  switch (op) {
    case Op::Not: lanes(d, n, [&](std::size_t j) -> std::int64_t { return !a[j]; }); break;
    case Op::And: lanes(d, n, [&](std::size_t j) -> std::int64_t { return a[j] && b[j]; }); break;
    case Op::Or: lanes(d, n, [&](std::size_t j) -> std::int64_t { return a[j] || b[j]; }); break;
    case Op::Eq: lanes(d, n, [&](std::size_t j) -> std::int64_t { return a[j] == b[j]; }); break;
    case Op::Slt: lanes(d, n, [&](std::size_t j) -> std::int64_t { return a[j] < b[j]; }); break;
    case Op::Sle: lanes(d, n, [&](std::size_t j) -> std::int64_t { return a[j] <= b[j]; }); break;
    case Op::Add: lanes(d, n, [&](std::size_t j) { return bv::add(a[j], b[j], w); }); break;
    case Op::Sub: lanes(d, n, [&](std::size_t j) { return bv::sub(a[j], b[j], w); }); break;
    case Op::Mul: lanes(d, n, [&](std::size_t j) { return bv::mul(a[j], b[j], w); }); break;
    case Op::Neg: lanes(d, n, [&](std::size_t j) { return bv::neg(a[j], w); }); break;
    case Op::BvAnd: lanes(d, n, [&](std::size_t j) { return a[j] & b[j]; }); break;
    case Op::BvOr: lanes(d, n, [&](std::size_t j) { return a[j] | b[j]; }); break;
    case Op::BvXor: lanes(d, n, [&](std::size_t j) { return a[j] ^ b[j]; }); break;
    default: lanes(d, n, [&](std::size_t j) { return apply(op, a[j], b[j], c[j], w); }); break;
  }
}

}  // namespace

const char* to_string(Engine e) {
  switch (e) {
    case Engine::Auto: return "auto";
    case Engine::Enumerate: return "enumerate";
    case Engine::SatCore: return "satcore";
  }
  return "?";
}

Engine engine_from_string(const std::string& s) {
  if (s == "auto") return Engine::Auto;
  if (s == "enumerate") return Engine::Enumerate;
  if (s == "satcore") return Engine::SatCore;
  throw Error("unknown engine '" + s + "'");
}

const char* to_string(SatStatus s) {
  switch (s) {
    case SatStatus::Sat: return "sat";
    case SatStatus::Unsat: return "unsat";
    case SatStatus::Unknown: return "unknown";
  }
  return "?";
}

BackendStats& backend_stats() { return g_stats; }
void reset_backend_stats() { g_stats = BackendStats{}; }
void set_differential(bool on) { g_differential = on; }
bool differential_enabled() { return g_differential; }
void set_cnf_dump_dir(const std::string& dir) { g_cnf_dir = dir; }

std::size_t free_bits(const TermManager& tm, const std::vector<TermId>& conjuncts) {
  std::size_t n = 0;
  for (auto v : tm.free_vars(conjuncts)) n += tm.vars()[v].is_bool ? 1 : tm.width();
  return n;
}

SolveResult solve_enumerate(const TermManager& tm, const std::vector<TermId>& conjuncts, unsigned max_bits) {
  SolveResult res;
  res.engine = Engine::Enumerate;
  res.free_bits = free_bits(tm, conjuncts);
  if (res.free_bits > max_bits)
    throw BudgetExceeded("BudgetExceeded: " + std::to_string(res.free_bits) + " free bits exceed the enumeration limit " +
                         std::to_string(max_bits));
  const unsigned w = tm.width();
  const auto fv = tm.free_vars(conjuncts);
  const auto nodes = tm.reachable(conjuncts);
  std::unordered_map<TermId, std::uint32_t> local;
  for (std::uint32_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = i;
  std::vector<int> pos(tm.vars().size(), -1);
  for (std::size_t k = 0; k < fv.size(); ++k) pos[fv[k]] = static_cast<int>(k);

  const int m = static_cast<int>(fv.size());
  std::vector<int> lvl(nodes.size(), -1);
  std::vector<std::int64_t> val(nodes.size(), 0);
  std::vector<std::vector<Instr>> code(static_cast<std::size_t>(m) + 1);
  std::vector<std::uint32_t> var_slot(static_cast<std::size_t>(m));
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    const Node& n = tm.node(nodes[i]);
    if (n.op == Op::BoolVar || n.op == Op::BvVar) {
      lvl[i] = pos[static_cast<std::size_t>(n.value)];
      var_slot[static_cast<std::size_t>(lvl[i])] = i;
      continue;
    }
    if (n.op == Op::True || n.op == Op::False || n.op == Op::Const) {
      val[i] = tm.const_value(nodes[i]);
      continue;
    }
    Instr ins{n.op, i, 0, 0, 0};
    std::uint32_t* slots[3] = {&ins.a, &ins.b, &ins.c};
    int l = -1;
    for (std::size_t k = 0; k < n.kids.size(); ++k) {
      std::uint32_t s = local.at(n.kids[k]);
      *slots[k] = s;
      l = std::max(l, lvl[s]);
    }
    lvl[i] = l;
    code[static_cast<std::size_t>(l + 1)].push_back(ins);
  }
  std::vector<std::vector<std::uint32_t>> checks(static_cast<std::size_t>(m) + 1);
  for (auto c : conjuncts) {
    std::uint32_t s = local.at(c);
    checks[static_cast<std::size_t>(lvl[s] + 1)].push_back(s);
  }
  auto run = [&](int level) {
    for (const Instr& ins : code[static_cast<std::size_t>(level + 1)])
      val[ins.dst] = apply(ins.op, val[ins.a], val[ins.b], val[ins.c], w);
    for (auto s : checks[static_cast<std::size_t>(level + 1)])
      if (!val[s]) return false;
    return true;
  };

  ++g_stats.enumerate_used;
  if (!run(-1)) {
    res.status = SatStatus::Unsat;
    return res;
  }
  if (m == 0) {
    res.status = SatStatus::Sat;
    res.model.assign(tm.vars().size(), 0);
    return res;
  }
  std::vector<std::uint64_t> cur(static_cast<std::size_t>(m), 0), limit(static_cast<std::size_t>(m));
  std::vector<char> is_bool(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    is_bool[static_cast<std::size_t>(k)] = tm.vars()[fv[static_cast<std::size_t>(k)]].is_bool;
    limit[static_cast<std::size_t>(k)] = is_bool[static_cast<std::size_t>(k)] ? 2 : (std::uint64_t{1} << w);
  }
  // The last variable is scanned lane-wise: every value at once per instruction.
  const std::size_t last = static_cast<std::size_t>(m - 1);
  const std::size_t nl = static_cast<std::size_t>(limit[last]);
  const bool batch = nl <= 256;
  std::vector<std::int64_t> lane_store;
  std::vector<std::int64_t> lane_of(nodes.size(), -1);
  if (batch) {
    std::size_t cnt = 0;
    for (std::uint32_t i = 0; i < nodes.size(); ++i)
      if (lvl[i] == m - 1) lane_of[i] = static_cast<std::int64_t>(cnt++ * nl);
    lane_store.assign(cnt * nl, 0);
    std::int64_t* v = lane_store.data() + lane_of[var_slot[last]];
    for (std::size_t j = 0; j < nl; ++j)
      v[j] = is_bool[last] ? static_cast<std::int64_t>(j) : bv::wrap(static_cast<std::int64_t>(j), w);
  }
  std::vector<char> ok(nl);
  auto src = [&](std::uint32_t slot) -> Src {
    if (lane_of[slot] >= 0) return {lane_store.data() + lane_of[slot], 1};
    return {&val[slot], 0};
  };
  // Last-level instructions grouped by the first check (newest conjunct first) that needs them.
  std::vector<std::pair<std::uint32_t, std::vector<Instr>>> groups;
  if (batch) {
    std::vector<int> instr_of(nodes.size(), -1);
    const auto& lastcode = code[static_cast<std::size_t>(m)];
    for (std::size_t i = 0; i < lastcode.size(); ++i) instr_of[lastcode[i].dst] = static_cast<int>(i);
    std::vector<char> taken(lastcode.size(), 0);
    const auto& lc = checks[static_cast<std::size_t>(m)];
    for (auto it = lc.rbegin(); it != lc.rend(); ++it) {
      std::vector<std::uint32_t> todo{*it};
      std::vector<Instr> g;
      while (!todo.empty()) {
        std::uint32_t slot = todo.back();
        todo.pop_back();
        int ii = instr_of[slot];
        if (ii < 0 || taken[static_cast<std::size_t>(ii)]) continue;
        taken[static_cast<std::size_t>(ii)] = 1;
        const Instr& ins = lastcode[static_cast<std::size_t>(ii)];
        g.push_back(ins);
        const Node& n = tm.node(nodes[slot]);
        std::uint32_t ops[3] = {ins.a, ins.b, ins.c};
        for (std::size_t q = 0; q < n.kids.size(); ++q) todo.push_back(ops[q]);
      }
      std::sort(g.begin(), g.end(), [](const Instr& x, const Instr& y) { return x.dst < y.dst; });
      groups.emplace_back(*it, std::move(g));
    }
  }
  // Returns the first lane satisfying every last-level check, or -1.
  auto run_batch = [&]() -> long {
    std::fill(ok.begin(), ok.end(), 1);
    for (auto& [chk, g] : groups) {
      for (const Instr& ins : g)
        apply_lanes(ins.op, lane_store.data() + lane_of[ins.dst], src(ins.a), src(ins.b), src(ins.c), nl, w);
      Src c = src(chk);
      bool any = false;
      for (std::size_t j = 0; j < nl; ++j) {
        ok[j] = ok[j] && c[j];
        any = any || ok[j];
      }
      if (!any) return -1;
    }
    for (std::size_t j = 0; j < nl; ++j)
      if (ok[j]) return static_cast<long>(j);
    return -1;
  };
  int k = 0;
  bool fresh = true;
  while (k >= 0) {
    auto uk = static_cast<std::size_t>(k);
    if (batch && k == m - 1) {
      long j = run_batch();
      if (j >= 0) {
        res.status = SatStatus::Sat;
        res.model.assign(tm.vars().size(), 0);
        for (int q = 0; q + 1 < m; ++q)
          res.model[fv[static_cast<std::size_t>(q)]] = val[var_slot[static_cast<std::size_t>(q)]];
        res.model[fv[last]] = lane_store[static_cast<std::size_t>(lane_of[var_slot[last]]) + static_cast<std::size_t>(j)];
        return res;
      }
      --k;
      fresh = false;
      continue;
    }
    if (!fresh) {
      if (++cur[uk] >= limit[uk]) {
        cur[uk] = 0;
        --k;
        continue;
      }
    }
    fresh = false;
    val[var_slot[uk]] = is_bool[uk] ? static_cast<std::int64_t>(cur[uk])
                                       : bv::wrap(static_cast<std::int64_t>(cur[uk]), w);
    if (!run(k)) continue;
    if (k + 1 == m) {
      res.status = SatStatus::Sat;
      res.model.assign(tm.vars().size(), 0);
      for (int j = 0; j < m; ++j) res.model[fv[static_cast<std::size_t>(j)]] = val[var_slot[static_cast<std::size_t>(j)]];
      return res;
    }
    ++k;
    fresh = true;
  }
  res.status = SatStatus::Unsat;
  return res;
}

SolveResult solve_satcore(const TermManager& tm, const std::vector<TermId>& conjuncts, const SolveOptions& opt) {
  SolveResult res;
  res.engine = Engine::SatCore;
  res.free_bits = free_bits(tm, conjuncts);
  ++g_stats.satcore_used;
  sat::Solver s;
  BitBlaster bb(tm, s);
  const auto fv = tm.free_vars(conjuncts);
  for (auto v : fv) bb.var_bits(v);
  for (auto c : conjuncts) s.add_clause({bb.blast_bool(c)});
  if (!g_cnf_dir.empty()) {
    std::filesystem::create_directories(g_cnf_dir);
    std::ofstream os(g_cnf_dir + "/query_" + std::to_string(g_stats.queries) + ".cnf");
    s.write_dimacs(os);
  }
  auto r = s.solve({}, opt.limits);
  if (r == sat::Result::Unsat) {
    res.status = SatStatus::Unsat;
    return res;
  }
  if (r == sat::Result::Unknown) {
    res.status = SatStatus::Unknown;
    return res;
  }
  auto read = [&](std::size_t v) -> std::int64_t {
    const auto& bits = bb.var_bits(v);
    std::uint64_t u = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (s.lit_true(bits[i])) u |= std::uint64_t{1} << i;
    if (tm.vars()[v].is_bool) return static_cast<std::int64_t>(u);
    return bv::wrap(static_cast<std::int64_t>(u), tm.width());
  };
  std::vector<std::int64_t> model(tm.vars().size(), 0);
  auto snapshot = [&] {
    for (auto v : fv) model[v] = read(v);
  };
  snapshot();
  if (opt.lexmin) {
    std::vector<sat::Lit> fixed;
    std::size_t budget = opt.lexmin_bits;
    const auto t0 = std::chrono::steady_clock::now();
    for (auto v : fv) {
      const auto bits = bb.var_bits(v);
      if (bits.size() > budget) break;
      budget -= bits.size();
      if (opt.limits.seconds >= 0 &&
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() > opt.limits.seconds)
        break;
      for (std::size_t i = bits.size(); i-- > 0;) {
        sat::Lit b = bits[i];
        std::uint64_t u = bv::to_unsigned(model[v], static_cast<unsigned>(bits.size()));
        if (!((u >> i) & 1)) {
          fixed.push_back(sat::negate(b));
          continue;
        }
        auto trial = fixed;
        trial.push_back(sat::negate(b));
        auto rr = s.solve(trial, opt.limits);
        if (rr == sat::Result::Sat) {
          snapshot();
          fixed.push_back(sat::negate(b));
        } else if (rr == sat::Result::Unsat) {
          fixed.push_back(b);
        } else {
          goto done;
        }
      }
    }
  }
done:
  res.status = SatStatus::Sat;
  res.model = std::move(model);
  return res;
}

SolveResult solve(const TermManager& tm, const std::vector<TermId>& conjuncts, const SolveOptions& opt) {
  ++g_stats.queries;
  const std::size_t bits = free_bits(tm, conjuncts);
  Engine engine = opt.engine;
  if (engine == Engine::Auto) engine = bits <= opt.enumerate_max_bits ? Engine::Enumerate : Engine::SatCore;
  SolveResult res = engine == Engine::Enumerate ? solve_enumerate(tm, conjuncts, opt.enumerate_max_bits)
                                                : solve_satcore(tm, conjuncts, opt);
  if (g_differential && bits <= opt.enumerate_max_bits) {
    SolveResult other = engine == Engine::Enumerate ? solve_satcore(tm, conjuncts, opt)
                                                    : solve_enumerate(tm, conjuncts, opt.enumerate_max_bits);
    if (res.status != SatStatus::Unknown && other.status != SatStatus::Unknown) {
      ++g_stats.differential_checks;
      if (res.status != other.status) ++g_stats.differential_mismatches;
    }
  }
  switch (res.status) {
    case SatStatus::Sat: {
      ++g_stats.sat;
      bool ok = true;
      for (auto v : tm.eval_many(conjuncts, res.model))
        if (!v) ok = false;
      if (!ok) throw Error("internal: solver model does not satisfy its formula");
      break;
    }
    case SatStatus::Unsat: ++g_stats.unsat; break;
    case SatStatus::Unknown: ++g_stats.unknown; break;
  }
  return res;
}

}  // namespace recveq::vc
