#include "recveq/prover.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "recveq/common.hpp"
#include "recveq/lang/loops.hpp"
#include "recveq/lang/printer.hpp"
#include "recveq/lang/typecheck.hpp"
#include "recveq/oracle.hpp"
#include "recveq/pathex.hpp"
#include "recveq/vc/encoder.hpp"

namespace recveq::prover {

namespace mk = lang::mk;
using lang::StmtPtr;
using transforms::UnrollTree;

namespace {

constexpr const char* kSelfUf = "__rv_uf";

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Rebuilds a statement tree bottom-up; `fn` may replace any statement.
StmtPtr map_stmts(const StmtPtr& s, const std::function<StmtPtr(const StmtPtr&)>& fn) {
  if (!s) return s;
  StmtPtr rebuilt = s;
  if (auto* b = std::get_if<lang::Block>(&s->node)) {
    std::vector<StmtPtr> out;
    for (auto& st : b->stmts) out.push_back(map_stmts(st, fn));
    rebuilt = std::make_shared<lang::Stmt>(lang::Stmt{lang::Block{std::move(out)}, s->pos});
  } else if (auto* i = std::get_if<lang::If>(&s->node)) {
    rebuilt = std::make_shared<lang::Stmt>(
        lang::Stmt{lang::If{i->cond, map_stmts(i->then_branch, fn), map_stmts(i->else_branch, fn)}, s->pos});
  } else if (auto* w = std::get_if<lang::While>(&s->node)) {
    rebuilt = std::make_shared<lang::Stmt>(lang::Stmt{lang::While{w->cond, map_stmts(w->body, fn)}, s->pos});
  }
  auto r = fn(rebuilt);
  return r ? r : rebuilt;
}

std::string slot_symbol(const std::string& sym, int slots, int k) {
  return slots == 1 ? sym : sym + "_s" + std::to_string(k);
}

// Calls to `targets` become applications of `sym` (one symbol per return slot).
FunctionDef abstract_calls(const FunctionDef& f, const std::set<std::string>& targets, const std::string& sym,
                           int slots) {
  if (slots == 1) return transforms::substitute_calls(f, targets, transforms::SubstitutionMode::uf(sym));
  FunctionDef out = f;
  out.body = map_stmts(f.body, [&](const StmtPtr& s) -> StmtPtr {
    auto* m = std::get_if<lang::MultiAssign>(&s->node);
    if (!m) return nullptr;
    const auto& c = std::get<lang::Call>(m->call->node);
    if (!targets.count(c.callee)) return nullptr;
    std::vector<StmtPtr> assigns;
    for (std::size_t k = 0; k < m->targets.size(); ++k) {
      std::vector<ExprPtr> args;
      for (auto& a : c.args) args.push_back(lang::clone(a));
      assigns.push_back(
          mk::assign(m->targets[k], mk::call(slot_symbol(sym, slots, static_cast<int>(k)), std::move(args), c.site)));
    }
    return mk::block(std::move(assigns));
  });
  return out;
}

void add_uf(SourceUnit& u, const std::string& sym, std::size_t arity, int slots) {
  for (int k = 0; k < slots; ++k)
    transforms::add_stub(u, transforms::SubstitutionMode::uf(slot_symbol(sym, slots, k)), arity);
}

ExprPtr to_entry(const ExprPtr& e, const std::vector<std::string>& params) {
  return lang::rename_vars(e, params, entry_params(params.size()));
}

// __rv_main(i0, ...): assumptions, both sides on the shared input, one assertion.
FunctionDef entry_function(const FunctionDef& d1, const std::string& f1, const std::string& f2,
                           const std::vector<ExprPtr>& assumptions) {
  const auto params = entry_params(d1.params.size());
  std::vector<StmtPtr> body;
  for (auto& a : assumptions)
    if (a && !lang::is_true_literal(a)) body.push_back(mk::assume(a));
  const int slots = d1.return_slots;
  auto args = [&] {
    std::vector<ExprPtr> v;
    for (auto& p : params) v.push_back(mk::var(p));
    return v;
  };
  ExprPtr eq;
  if (slots == 1) {
    eq = mk::binary(lang::BinaryOp::Eq, mk::call(f1, args()), mk::call(f2, args()));
  } else {
    std::vector<std::string> a, b;
    for (int k = 0; k < slots; ++k) {
      a.push_back("__rv_a" + std::to_string(k));
      b.push_back("__rv_b" + std::to_string(k));
      body.push_back(mk::decl(a.back(), mk::lit(0)));
      body.push_back(mk::decl(b.back(), mk::lit(0)));
    }
    body.push_back(mk::multi_assign(a, mk::call(f1, args())));
    body.push_back(mk::multi_assign(b, mk::call(f2, args())));
    for (int k = 0; k < slots; ++k) {
      auto e = mk::binary(lang::BinaryOp::Eq, mk::var(a[static_cast<std::size_t>(k)]), mk::var(b[static_cast<std::size_t>(k)]));
      eq = eq ? mk::land(eq, e) : e;
    }
  }
  body.push_back(mk::assert_(eq));
  body.push_back(mk::ret(mk::lit(0)));
  return FunctionDef{transforms::kBcMain, params, mk::block(std::move(body)), 1, {}};
}

struct Dumper {
  const Options& opt;
  const PairContext& p;
  void operator()(const std::string& task, const SourceUnit& u, bool flat) const {
    if (opt.dump_dir.empty()) return;
    std::filesystem::create_directories(opt.dump_dir);
    const std::string base = opt.dump_dir + "/" + p.f1 + "_" + p.f2 + "_" + task;
    std::ofstream(base + ".mrc") << lang::print(u);
    if (flat && opt.emit_smt) {
      try {
        std::ofstream(base + ".smt2") << vc::emit_smtlib(vc::encode_flat({u, transforms::kBcMain}, opt.width));
      } catch (const vc::NotFlat&) {
      }
    }
  }
};

pathex::Options path_options(const Options& opt) {
  pathex::Options po;
  po.width = opt.width;
  po.depth_bound = opt.depth_bound;
  po.path_bound = opt.path_bound;
  po.solver = opt.solver;
  return po;
}

vc::CheckOptions check_options(const Options& opt) {
  vc::CheckOptions co;
  co.width = opt.width;
  co.solver = opt.solver;
  return co;
}

const FunctionDef& get(const SourceUnit& u, const std::string& name) {
  const FunctionDef* f = u.find(name);
  if (!f) throw Error("unknown function " + name);
  return *f;
}

// Both sides terminate on `input` within `fuel` and disagree.
std::optional<std::pair<std::int64_t, std::int64_t>> confirm(const PairContext& p,
                                                             const std::vector<std::int64_t>& input,
                                                             std::size_t fuel, unsigned width) {
  oracle::InterpOptions io;
  io.width = width;
  io.fuel = fuel;
  auto a = oracle::eval(p.real1, p.real_f1, input, io);
  auto b = oracle::eval(p.real2, p.real_f2, input, io);
  if (!a.terminated() || !b.terminated() || a.values == b.values) return std::nullopt;
  return std::make_pair(a.value(), b.value());
}

bool has_ufs(const SourceUnit& u) { return !u.ufs.empty(); }

std::string rename_prefix(const std::string& n) { return "__rv_p2_" + n; }

}  // namespace

std::vector<std::string> entry_params(std::size_t arity) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < arity; ++i) out.push_back("i" + std::to_string(i));
  return out;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Equivalent: return "Equivalent";
    case Verdict::NotEquivalent: return "NotEquivalent";
    case Verdict::NotProven: return "NotProven";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

const char* to_string(Reason r) {
  switch (r) {
    case Reason::None: return "";
    case Reason::PremiseFailed: return "PremiseFailed";
    case Reason::BaseFailed: return "BaseFailed";
    case Reason::StepFailed: return "StepFailed";
    case Reason::SyncUnrollingNotFound: return "SyncUnrollingNotFound";
    case Reason::CalleeUnproven: return "CalleeUnproven";
    case Reason::Unsupported: return "Unsupported";
    case Reason::BaseInconclusive: return "BaseInconclusive";
    case Reason::SolverBudget: return "SolverBudget";
  }
  return "?";
}

const char* to_string(SubResult::Kind k) {
  switch (k) {
    case SubResult::Kind::Valid: return "Valid";
    case SubResult::Kind::Failed: return "Failed";
    case SubResult::Kind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

PairContext make_pair_context(const SourceUnit& u1, const std::string& f1, const SourceUnit& u2,
                              const std::string& f2) {
  PairContext p;
  p.unit = u1;
  p.real1 = u1;
  p.real2 = u2;
  p.real_f1 = f1;
  p.real_f2 = f2;
  p.f1 = f1;
  std::map<std::string, std::string> ren;
  for (auto& g : u2.functions)
    if (u1.has_name(g.name)) ren[g.name] = rename_prefix(g.name);
  for (auto& uf : u2.ufs) {
    const auto* mine = u1.find_uf(uf.name);
    if (mine && mine->arity == uf.arity) continue;
    if (u1.has_name(uf.name)) ren[uf.name] = rename_prefix(uf.name);
  }
  auto rn = [&](const std::string& n) {
    auto it = ren.find(n);
    return it == ren.end() ? n : it->second;
  };
  for (auto& g : u2.globals) {
    bool clash = std::any_of(u1.globals.begin(), u1.globals.end(), [&](const lang::GlobalDecl& x) { return x.name == g.name; });
    if (clash) throw TransformError("NameClash", "both programs declare the global '" + g.name + "'");
    p.unit.put_global(g);
  }
  for (auto& uf : u2.ufs) p.unit.put_uf({rn(uf.name), uf.arity});
  for (auto& g : u2.functions) {
    FunctionDef h = g;
    h.name = rn(g.name);
    h.body = lang::rewrite_calls(g.body, [&](const lang::Call& c, const ExprPtr& rebuilt) -> ExprPtr {
      if (!ren.count(c.callee)) return nullptr;
      return std::make_shared<lang::Expr>(lang::Expr{lang::Call{rn(c.callee), std::get<lang::Call>(rebuilt->node).args, c.site}, rebuilt->pos});
    });
    p.unit.put(std::move(h));
  }
  p.f2 = rn(f2);
  get(p.unit, p.f1);
  get(p.unit, p.f2);
  return p;
}

PairContext make_pair_context(const SourceUnit& u, const std::string& f1, const std::string& f2) {
  PairContext p;
  p.unit = u;
  p.real1 = u;
  p.real2 = u;
  p.f1 = p.real_f1 = f1;
  p.f2 = p.real_f2 = f2;
  get(u, f1);
  get(u, f2);
  if (f1 == f2) {
    p.f2 = rename_prefix(f2);
    FunctionDef h = get(u, f2);
    h.name = p.f2;
    h.body = lang::rewrite_calls(h.body, [&](const lang::Call& c, const ExprPtr& rebuilt) -> ExprPtr {
      if (c.callee != f2) return nullptr;
      return std::make_shared<lang::Expr>(lang::Expr{lang::Call{p.f2, std::get<lang::Call>(rebuilt->node).args, c.site}, rebuilt->pos});
    });
    p.unit.put(std::move(h));
  }
  return p;
}

ProofOutcome prove_part_eq_basic(const PairContext& p, const Options& opt) {
  const auto t0 = Clock::now();
  ProofOutcome out;
  out.strategy = "part-eq";
  const FunctionDef& d1 = get(p.unit, p.f1);
  const FunctionDef& d2 = get(p.unit, p.f2);
  if (d1.params.size() != d2.params.size() || d1.return_slots != d2.return_slots) {
    out.reason = Reason::Unsupported;
    out.detail = "the two functions have different signatures";
    return out;
  }
  SourceUnit u = part_eq_task(p);
  Dumper{opt, p}("part_eq", u, true);
  auto r = vc::check_valid({u, transforms::kBcMain}, check_options(opt));
  Step st{"part-eq", vc::to_string(r.verdict), r.note, since(t0)};
  switch (r.verdict) {
    case vc::Validity::Valid: out.verdict = Verdict::Equivalent; break;
    case vc::Validity::Counterexample:
      out.verdict = Verdict::NotProven;
      out.reason = Reason::PremiseFailed;
      out.witness = r.inputs;
      st.detail = "premise counterexample at " + [&] {
        std::string s;
        for (auto v : r.inputs) s += (s.empty() ? "" : ",") + std::to_string(v);
        return s;
      }();
      break;
    case vc::Validity::Inconclusive:
      out.verdict = Verdict::Inconclusive;
      out.reason = Reason::SolverBudget;
      out.detail = r.note;
      break;
  }
  out.trail.push_back(st);
  out.seconds = since(t0);
  return out;
}

namespace {

struct Unrolled {
  std::vector<FunctionDef> clones;
  ExprPtr rho;
};

Unrolled unroll_side(const PairContext& p, const std::string& fn, const UnrollTree& tree, const Options& opt) {
  Unrolled u;
  u.clones = transforms::apply_unrolling(get(p.unit, fn), tree);
  u.rho = pathex::natural_base_case_precondition(p.unit, fn, path_options(opt));
  return u;
}

// bcpc over the instrumented entry's parameters.
ExprPtr bcpc_raw(const SourceUnit& ctx, const std::string& fn, const Unrolled& side, const Options& opt,
                 std::vector<std::string>& params) {
  auto ins = transforms::instrument_bc_flag(side.clones, fn, side.rho);
  for (auto& g : ctx.functions)
    if (!ins.unit.has_name(g.name) && g.name != fn) ins.unit.put(g);
  for (auto& uf : ctx.ufs)
    if (!ins.unit.has_name(uf.name)) ins.unit.put_uf(uf);
  for (auto& g : ctx.globals) ins.unit.put_global(g);
  params = ins.params;
  return pathex::base_case_precondition(ins, path_options(opt));
}

ExprPtr bcpc_of(const PairContext& p, const std::string& fn, const Unrolled& side, const Options& opt) {
  std::vector<std::string> params;
  auto e = bcpc_raw(p.unit, fn, side, opt, params);
  return to_entry(e, params);
}

}  // namespace

ExprPtr base_case_of(const SourceUnit& u, const std::string& fn, const UnrollTree& tree, const Options& opt) {
  const FunctionDef& d = get(u, fn);
  Unrolled side{transforms::apply_unrolling(d, tree), pathex::natural_base_case_precondition(u, fn, path_options(opt))};
  std::vector<std::string> params;
  auto e = bcpc_raw(u, fn, side, opt, params);
  return lang::rename_vars(e, params, d.params);
}

SourceUnit part_eq_task(const PairContext& p) {
  const FunctionDef& d1 = get(p.unit, p.f1);
  const FunctionDef& d2 = get(p.unit, p.f2);
  if (d1.params.size() != d2.params.size() || d1.return_slots != d2.return_slots)
    throw TransformError("ArityMismatch", "the two functions have different signatures");
  SourceUnit u = p.unit;
  u.put(abstract_calls(d1, {p.f1}, kSelfUf, d1.return_slots));
  u.put(abstract_calls(d2, {p.f2}, kSelfUf, d2.return_slots));
  add_uf(u, kSelfUf, d1.params.size(), d1.return_slots);
  u.put(entry_function(d1, p.f1, p.f2, {}));
  return u;
}

SubResult prove_path_base_equiv(const PairContext& p, const SyncUnrolling& su, const ExprPtr& restrict,
                                BaseCaseInfo& info, const Options& opt) {
  SubResult res;
  Unrolled s1 = unroll_side(p, p.f1, su.side[0], opt);
  Unrolled s2 = unroll_side(p, p.f2, su.side[1], opt);
  info.bcpc1 = bcpc_of(p, p.f1, s1, opt);
  info.bcpc2 = bcpc_of(p, p.f2, s2, opt);
  info.ebcp = pathex::disjunction({info.bcpc1, info.bcpc2});
  SourceUnit u = p.unit;
  for (auto& c : s1.clones) u.put(c);
  for (auto& c : s2.clones) u.put(c);
  u.put(entry_function(get(p.unit, p.f1), p.f1, p.f2, {restrict, info.ebcp}));
  Dumper{opt, p}("base", u, false);
  auto r = pathex::symexec_equiv({u, transforms::kBcMain}, path_options(opt));
  switch (r.verdict) {
    case pathex::SymVerdict::Proven:
      res.kind = SubResult::Kind::Valid;
      res.detail = std::to_string(r.paths) + " paths";
      break;
    case pathex::SymVerdict::Refuted:
      res.kind = SubResult::Kind::Failed;
      res.input = r.input;
      res.replay_ok = r.replay_ok;
      res.detail = "assertion fails on a base-case input";
      break;
    case pathex::SymVerdict::Inconclusive:
      res.kind = SubResult::Kind::Inconclusive;
      res.detail = r.reason;
      break;
  }
  return res;
}

SubResult prove_path_step_equiv(const PairContext& p, const SyncUnrolling& su, const ExprPtr& ebcp,
                                const ExprPtr& restrict, const Options& opt) {
  SubResult res;
  const FunctionDef& d1 = get(p.unit, p.f1);
  const FunctionDef& d2 = get(p.unit, p.f2);
  SourceUnit u = p.unit;
  for (auto& c : transforms::apply_unrolling(d1, su.side[0]))
    u.put(abstract_calls(c, {p.f1}, kSelfUf, d1.return_slots));
  for (auto& c : transforms::apply_unrolling(d2, su.side[1]))
    u.put(abstract_calls(c, {p.f2}, kSelfUf, d2.return_slots));
  add_uf(u, kSelfUf, d1.params.size(), d1.return_slots);
  u.put(entry_function(d1, p.f1, p.f2, {restrict, pathex::negation(ebcp)}));
  Dumper{opt, p}("step", u, true);
  auto r = vc::check_valid({u, transforms::kBcMain}, check_options(opt));
  switch (r.verdict) {
    case vc::Validity::Valid: res.kind = SubResult::Kind::Valid; break;
    case vc::Validity::Counterexample:
      res.kind = SubResult::Kind::Failed;
      res.input = r.inputs;
      res.replay_ok = r.replay_ok;
      res.detail = "UF-abstracted step has a counterexample";
      break;
    case vc::Validity::Inconclusive:
      res.kind = SubResult::Kind::Inconclusive;
      res.detail = r.note;
      break;
  }
  return res;
}

bool check_pair_feasible(const ExprPtr& pp1, const ExprPtr& pp2, std::size_t arity, const Options& opt) {
  if (lang::is_false_literal(pp1) || lang::is_false_literal(pp2)) return false;
  SourceUnit u;
  std::vector<StmtPtr> body{mk::assume(pp1), mk::assume(pp2), mk::assert_(mk::lit(0)), mk::ret(mk::lit(0))};
  u.put(FunctionDef{transforms::kBcMain, entry_params(arity), mk::block(std::move(body)), 1, {}});
  auto r = vc::check_valid({u, transforms::kBcMain}, check_options(opt));
  return r.verdict != vc::Validity::Valid;
}

namespace {

std::string join(const std::vector<std::int64_t>& v) {
  std::string s;
  for (auto x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
  return s;
}

// Parameter positions the base-case predicates read.
std::vector<std::size_t> control_positions(const ExprPtr& rho1, const ExprPtr& rho2, std::size_t arity) {
  std::set<std::string> used;
  for (auto& v : lang::free_variables(rho1)) used.insert(v);
  for (auto& v : lang::free_variables(rho2)) used.insert(v);
  std::vector<std::size_t> out;
  const auto names = entry_params(arity);
  for (std::size_t k = 0; k < arity; ++k)
    if (used.count(names[k])) out.push_back(k);
  return out;
}

}  // namespace

ProofOutcome prove_full_part_eq(const PairContext& p, const Options& opt) {
  const auto t0 = Clock::now();
  ProofOutcome out;
  out.strategy = "full-part-eq";
  const FunctionDef& d1 = get(p.unit, p.f1);
  const FunctionDef& d2 = get(p.unit, p.f2);
  const std::size_t arity = d1.params.size();
  if (arity != d2.params.size() || d1.return_slots != d2.return_slots) {
    out.reason = Reason::Unsupported;
    out.detail = "the two functions have different signatures";
    return out;
  }
  const auto popt = path_options(opt);
  auto paths1 = pathex::get_all_paths(p.unit, p.f1, popt);
  auto paths2 = pathex::get_all_paths(p.unit, p.f2, popt);
  ExprPtr rho1 = pathex::natural_base_case_precondition(p.unit, p.f1, popt);
  ExprPtr rho2 = pathex::natural_base_case_precondition(p.unit, p.f2, popt);
  out.trail.push_back({"paths", std::to_string(paths1.size()) + "x" + std::to_string(paths2.size()),
                       "rho1: " + lang::print(pathex::interval_form(rho1, d1.params, opt.width)) +
                           "; rho2: " + lang::print(pathex::interval_form(rho2, d2.params, opt.width)),
                       since(t0)});
  const auto shown = [&](const ExprPtr& e) {
    return lang::print(pathex::interval_form(e, entry_params(arity), opt.width));
  };
  const ExprPtr erho1 = to_entry(rho1, d1.params);
  const ExprPtr erho2 = to_entry(rho2, d2.params);

  struct Job {
    pathex::PathInfo a, b;
    bool mixed;
  };
  std::vector<Job> jobs;
  std::size_t index = 0;
  for (auto& a : paths1)
    for (auto& b : paths2) {
      if (!a.recursive && !b.recursive) continue;
      PathPairResult pr;
      pr.index = index++;
      pr.pp1 = lang::print(a.pred);
      pr.pp2 = lang::print(b.pred);
      pr.mixed = !(a.recursive && b.recursive);
      auto tf = Clock::now();
      pr.feasible = check_pair_feasible(to_entry(a.pred, d1.params), to_entry(b.pred, d2.params), arity, opt);
      out.trail.push_back({"feasibility[" + std::to_string(pr.index) + "]", pr.feasible ? "Feasible" : "Infeasible",
                           pr.pp1 + " / " + pr.pp2, since(tf)});
      if (!pr.feasible) ++out.pruned_pairs;
      else jobs.push_back({a, b, pr.mixed});
      out.path_pairs.push_back(std::move(pr));
    }
  if (jobs.empty()) {
    // only base-case inputs remain: one pair restricted to rho1 && rho2
    jobs.push_back({{rho1, false}, {rho2, false}, true});
    PathPairResult pr;
    pr.index = index++;
    pr.pp1 = lang::print(rho1);
    pr.pp2 = lang::print(rho2);
    pr.mixed = true;
    out.path_pairs.push_back(pr);
  }

  bool capped = false;
  std::string cap_detail;
  std::size_t job_no = 0;
  for (auto& pr : out.path_pairs) {
    if (!pr.feasible) continue;
    const Job& job = jobs[job_no++];
    const std::string tag = "[" + std::to_string(pr.index) + "]";
    ExprPtr r1 = pathex::disjunction({job.a.pred, rho1});
    ExprPtr r2 = pathex::disjunction({job.b.pred, rho2});
    ExprPtr restrict = pathex::conjunction({to_entry(r1, d1.params), to_entry(r2, d2.params)});

    SyncUnrolling su{UnrollTree::leaf(), UnrollTree::leaf()};
    auto ts = Clock::now();
    if (job.mixed) {
      pr.sync = "identity (one side base-only)";
    } else if (opt.manual_su) {
      su = *opt.manual_su;
      pr.sync = "manual";
    } else {
      SourceUnit restricted = p.unit;
      restricted.put(transforms::add_assumption(d1, r1, true));
      restricted.put(transforms::add_assumption(d2, r2, true));
      sync::Options so;
      so.max_uw = opt.max_uw;
      so.strict_size_guard = opt.strict_size_guard;
      so.seconds = opt.sync_seconds;
      so.check = check_options(opt);
      auto sr = sync::find_sync_unrolling(restricted, p.f1, p.f2, rho1, rho2, so);
      if (!sr.found && opt.relaxed_sync && sr.reason == sync::NotFoundReason::ProvedImpossibleUpTo) {
        auto proj = control_positions(erho1, erho2, arity);
        if (!proj.empty() && proj.size() < arity) {
          so.projection = proj;
          auto rr = sync::find_sync_unrolling(restricted, p.f1, p.f2, rho1, rho2, so);
          if (rr.found) {
            sr = rr;
            pr.relaxed = true;
          }
        }
      }
      if (sr.found) {
        su = sr.su;
        pr.sync = "found at uw=" + std::to_string(sr.uw) + " (input " + join(sr.witness.input) + ")" +
                  (pr.relaxed ? " comparing base-case parameters only" : "");
      } else {
        pr.sync = std::string("NotFound: ") + sync::to_string(sr.reason) +
                  (sr.reason == sync::NotFoundReason::ProvedImpossibleUpTo ? " uw=" + std::to_string(sr.proved_up_to)
                                                                           : "") +
                  (sr.note.empty() ? "" : " (" + sr.note + ")");
        out.trail.push_back({"sync" + tag, "NotFound", pr.sync, since(ts)});
        // no unrolling at all, as a last attempt
        BaseCaseInfo info;
        auto b = prove_path_base_equiv(p, su, restrict, info, opt);
        auto s = b.kind == SubResult::Kind::Failed ? SubResult{} : prove_path_step_equiv(p, su, info.ebcp, restrict, opt);
        if (b.kind == SubResult::Kind::Valid && s.kind == SubResult::Kind::Valid) {
          pr.base = "Valid";
          pr.step = "Valid";
          pr.su = su;
          pr.bcpc1 = shown(info.bcpc1);
          pr.bcpc2 = shown(info.bcpc2);
          out.trail.push_back({"identity" + tag, "Valid", "the pair needs no unrolling", since(ts)});
          continue;
        }
        if (b.kind == SubResult::Kind::Failed && b.input) out.witness = b.input;
        out.verdict = Verdict::NotProven;
        out.reason = Reason::SyncUnrollingNotFound;
        out.detail = "path pair " + std::to_string(pr.index) + ": " + pr.sync;
        out.seconds = since(t0);
        return out;
      }
    }
    pr.su = su;
    out.trail.push_back({"sync" + tag, pr.sync, sync::to_json(su), since(ts)});
    if (out.path_pairs.size() == 1 || jobs.size() == 1) out.su = su;

    auto tb = Clock::now();
    BaseCaseInfo info;
    auto base = prove_path_base_equiv(p, su, restrict, info, opt);
    pr.base = to_string(base.kind);
    pr.bcpc1 = shown(info.bcpc1);
    pr.bcpc2 = shown(info.bcpc2);
    out.trail.push_back({"base" + tag, pr.base, base.detail, since(tb)});
    if (base.kind == SubResult::Kind::Failed) {
      out.verdict = Verdict::NotProven;
      out.reason = Reason::BaseFailed;
      out.detail = "path pair " + std::to_string(pr.index) + ": " + base.detail;
      if (base.input) {
        out.witness = base.input;
        if (auto d = confirm(p, *base.input, std::size_t{1} << 16, opt.width)) {
          out.verdict = Verdict::NotEquivalent;
          out.reason = Reason::None;
          out.v1 = d->first;
          out.v2 = d->second;
        }
      }
      out.seconds = since(t0);
      return out;
    }
    if (base.kind == SubResult::Kind::Inconclusive) {
      capped = true;
      cap_detail = "path pair " + std::to_string(pr.index) + " base case: " + base.detail;
    }
    auto tst = Clock::now();
    auto step = prove_path_step_equiv(p, su, info.ebcp, restrict, opt);
    pr.step = to_string(step.kind);
    out.trail.push_back({"step" + tag, pr.step, step.detail, since(tst)});
    if (step.kind == SubResult::Kind::Failed) {
      out.verdict = Verdict::NotProven;
      out.reason = Reason::StepFailed;
      out.detail = "path pair " + std::to_string(pr.index) + ": " + step.detail;
      if (step.input) out.witness = step.input;
      out.seconds = since(t0);
      return out;
    }
    if (step.kind == SubResult::Kind::Inconclusive) {
      capped = true;
      if (cap_detail.empty()) cap_detail = "path pair " + std::to_string(pr.index) + " step: " + step.detail;
    }
  }
  if (capped) {
    out.verdict = Verdict::Inconclusive;
    out.reason = cap_detail.find("base case") != std::string::npos ? Reason::BaseInconclusive : Reason::SolverBudget;
    out.detail = cap_detail;
  } else {
    out.verdict = Verdict::Equivalent;
  }
  out.seconds = since(t0);
  return out;
}

namespace {

// Looks for a terminating disagreement: given candidates first, then the bounded domain.
bool refute(const PairContext& p, const std::vector<std::vector<std::int64_t>>& candidates, const Options& opt,
            ProofOutcome& out) {
  if (has_ufs(p.real1) || has_ufs(p.real2)) return false;
  const auto t0 = Clock::now();
  for (auto& c : candidates)
    if (auto d = confirm(p, c, opt.refute_fuel, opt.width)) {
      out.witness = c;
      out.v1 = d->first;
      out.v2 = d->second;
      out.trail.push_back({"refute", "witness", "candidate input " + join(c), since(t0)});
      return true;
    }
  const std::size_t arity = get(p.real1, p.real_f1).params.size();
  oracle::DomainSpec d;
  d.fuel = opt.refute_fuel;
  d.width = opt.width;
  if (arity == 2)
    d.ranges.assign(arity, {-32, 31});
  else if (arity > 2)
    d.ranges.assign(arity, {-16, 15});
  auto r = oracle::brute_force_equiv(p.real1, p.real_f1, p.real2, p.real_f2, d);
  if (r.equivalent) {
    out.trail.push_back({"refute", "none", std::to_string(r.checked) + " inputs agree, " +
                                               std::to_string(r.fuel_limited.size()) + " fuel-limited",
                         since(t0)});
    return false;
  }
  out.witness = r.input;
  out.v1 = r.v1;
  out.v2 = r.v2;
  out.trail.push_back({"refute", "witness", "oracle sweep input " + join(r.input), since(t0)});
  return true;
}

}  // namespace

ProofOutcome prove_pair(const PairContext& p, const Options& opt) {
  const auto t0 = Clock::now();
  ProofOutcome out;
  std::vector<std::vector<std::int64_t>> candidates;
  try {
    out = prove_part_eq_basic(p, opt);
    if (out.witness) candidates.push_back(*out.witness);
    if (out.verdict != Verdict::Equivalent && opt.escalate) {
      auto trail = out.trail;
      auto full = prove_full_part_eq(p, opt);
      trail.insert(trail.end(), full.trail.begin(), full.trail.end());
      full.trail = std::move(trail);
      out = std::move(full);
      if (out.witness) candidates.push_back(*out.witness);
    }
  } catch (const PathBudgetExceeded& e) {
    out.verdict = Verdict::Inconclusive;
    out.reason = Reason::SolverBudget;
    out.detail = e.what();
  } catch (const vc::NotFlat& e) {
    out.verdict = Verdict::NotProven;
    out.reason = Reason::Unsupported;
    out.detail = e.what();
  } catch (const TransformError& e) {
    out.verdict = Verdict::NotProven;
    out.reason = Reason::Unsupported;
    out.detail = e.what();
  }
  if (out.verdict == Verdict::NotEquivalent) {
    out.seconds = since(t0);
    return out;
  }
  if (out.verdict != Verdict::Equivalent && opt.refute) {
    ProofOutcome probe;
    if (refute(p, candidates, opt, probe)) {
      out.verdict = Verdict::NotEquivalent;
      out.detail = out.reason == Reason::None ? "" : std::string("no proof (") + to_string(out.reason) + "); " + out.detail;
      out.reason = Reason::None;
      out.witness = probe.witness;
      out.v1 = probe.v1;
      out.v2 = probe.v2;
    }
    out.trail.insert(out.trail.end(), probe.trail.begin(), probe.trail.end());
  }
  if (out.verdict == Verdict::Equivalent) out.witness.reset();
  out.seconds = since(t0);
  return out;
}

EquivalenceReport prove_programs(const SourceUnit& in1, const SourceUnit& in2,
                                 const std::vector<std::pair<std::string, std::string>>& mapping,
                                 const Options& opt) {
  lang::typecheck(in1);
  lang::typecheck(in2);
  const SourceUnit u1 = lang::loops_to_recursion(in1);
  const SourceUnit u2 = lang::loops_to_recursion(in2);
  auto g1 = lang::call_graph(u1);
  auto g2 = lang::call_graph(u2);
  std::map<std::string, std::string> to2;
  for (auto& [a, b] : mapping) {
    if (!u1.find(a)) throw Error("unknown function " + a + " in the first program");
    if (!u2.find(b)) throw Error("unknown function " + b + " in the second program");
    to2[a] = b;
  }
  std::vector<std::pair<std::string, std::string>> order;
  for (auto& n : g1.bottom_up)
    if (to2.count(n)) order.emplace_back(n, to2[n]);

  auto reaches = [](const lang::CallGraph& g, const std::string& from, const std::string& to) {
    std::set<std::string> seen;
    std::vector<std::string> todo{from};
    while (!todo.empty()) {
      auto n = todo.back();
      todo.pop_back();
      auto it = g.edges.find(n);
      if (it == g.edges.end()) continue;
      for (auto& y : it->second)
        if (y != n && !seen.count(y)) {
          if (y == to) return true;
          seen.insert(y);
          todo.push_back(y);
        }
    }
    return false;
  };

  EquivalenceReport rep;
  std::map<std::string, bool> proven;  // by side-1 name
  SourceUnit a1 = u1, a2 = u2;
  for (auto& [a, b] : order) {
    PairReport pr{a, b, {}};
    std::string blocked;
    for (auto& [x, y] : order) {
      if (x == a) continue;
      bool called = reaches(g1, a, x) || reaches(g2, b, y);
      if (called && !proven[x]) blocked = x + "/" + y;
    }
    if (!blocked.empty()) {
      pr.outcome.verdict = Verdict::NotProven;
      pr.outcome.reason = Reason::CalleeUnproven;
      pr.outcome.detail = "callee pair " + blocked + " is not proven";
      rep.pairs.push_back(pr);
      proven[a] = false;
      continue;
    }
    PairContext ctx = make_pair_context(a1, a, a2, b);
    ctx.real1 = u1;
    ctx.real2 = u2;
    pr.outcome = prove_pair(ctx, opt);
    proven[a] = pr.outcome.verdict == Verdict::Equivalent;
    if (proven[a]) {
      const std::string sym = "__rv_pair_" + a + "_" + b;
      const int slots = get(u1, a).return_slots;
      const std::size_t arity = get(u1, a).params.size();
      for (auto& f : a1.functions)
        if (f.name != a) f = abstract_calls(f, {a}, sym, slots);
      for (auto& f : a2.functions)
        if (f.name != b) f = abstract_calls(f, {b}, sym, slots);
      add_uf(a1, sym, arity, slots);
      add_uf(a2, sym, arity, slots);
    }
    rep.pairs.push_back(std::move(pr));
  }
  return rep;
}

namespace {

nlohmann::json outcome_json(const ProofOutcome& o, const std::string& n1, const std::string& n2) {
  nlohmann::json j;
  j["names"] = {n1, n2};
  j["verdict"] = to_string(o.verdict);
  j["reason"] = to_string(o.reason);
  j["detail"] = o.detail;
  j["strategy"] = o.strategy;
  j["su"] = o.su ? nlohmann::json::parse(sync::to_json(*o.su)) : nlohmann::json(nullptr);
  j["pruned_pairs"] = o.pruned_pairs;
  j["path_pairs"] = nlohmann::json::array();
  for (auto& pp : o.path_pairs) {
    nlohmann::json x;
    x["index"] = pp.index;
    x["pp1"] = pp.pp1;
    x["pp2"] = pp.pp2;
    x["feasible"] = pp.feasible;
    x["mixed"] = pp.mixed;
    x["sync"] = pp.sync;
    x["base"] = pp.base;
    x["step"] = pp.step;
    x["bcpc1"] = pp.bcpc1;
    x["bcpc2"] = pp.bcpc2;
    x["su"] = pp.su ? nlohmann::json::parse(sync::to_json(*pp.su)) : nlohmann::json(nullptr);
    j["path_pairs"].push_back(x);
  }
  if (o.witness) {
    j["witness"] = *o.witness;
    if (o.verdict == Verdict::NotEquivalent) j["values"] = {o.v1, o.v2};
  }
  j["trail"] = nlohmann::json::array();
  for (auto& s : o.trail) j["trail"].push_back({{"task", s.task}, {"result", s.result}, {"detail", s.detail}, {"seconds", s.seconds}});
  j["timings"] = {{"seconds", o.seconds}};
  return j;
}

}  // namespace

std::string to_json(const ProofOutcome& o, const std::string& n1, const std::string& n2) {
  nlohmann::json j;
  j["schema"] = 1;
  j["pairs"] = nlohmann::json::array({outcome_json(o, n1, n2)});
  return j.dump(2);
}

std::string to_json(const EquivalenceReport& r) {
  nlohmann::json j;
  j["schema"] = 1;
  j["pairs"] = nlohmann::json::array();
  for (auto& p : r.pairs) j["pairs"].push_back(outcome_json(p.outcome, p.name1, p.name2));
  return j.dump(2);
}

std::string summary_table(const EquivalenceReport& r) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %-14s %-22s %-13s %8s\n", "pair", "verdict", "reason", "strategy", "seconds");
  os << line;
  for (auto& p : r.pairs) {
    std::string v = to_string(p.outcome.verdict);
    std::snprintf(line, sizeof line, "%-24s %-14s %-22s %-13s %8.2f\n", (p.name1 + "/" + p.name2).c_str(), v.c_str(),
                  to_string(p.outcome.reason), p.outcome.strategy.c_str(), p.outcome.seconds);
    os << line;
    if (p.outcome.verdict == Verdict::NotEquivalent && p.outcome.witness)
      os << "    witness (" << join(*p.outcome.witness) << "): " << p.outcome.v1 << " vs " << p.outcome.v2 << "\n";
    if (!p.outcome.detail.empty()) os << "    " << p.outcome.detail << "\n";
  }
  return os.str();
}

int exit_code(const EquivalenceReport& r) {
  bool all = true;
  for (auto& p : r.pairs) {
    if (p.outcome.verdict == Verdict::NotEquivalent) return 2;
    all = all && p.outcome.verdict == Verdict::Equivalent;
  }
  return all ? 0 : 1;
}

}  // namespace recveq::prover
