#include "recveq/pathex.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "recveq/common.hpp"
#include "recveq/oracle.hpp"

namespace recveq::pathex {

using namespace lang;
using vc::TermId;
using vc::TermManager;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct Blocked {};
struct DepthHit {};
struct Violated {};
struct SolverGaveUp {};

using Model = std::vector<std::int64_t>;

struct Pending {
  std::vector<bool> prefix;
  std::optional<Model> model;  // unset: feasibility of `pc` not checked yet
  std::vector<TermId> pc;
};

struct Run {
  enum class End { Returned, Blocked, DepthHit, Violation } end = End::Returned;
  std::vector<TermId> pc;     // every constraint of the path
  std::vector<TermId> conds;  // branch and assume conditions, for predicates
  std::vector<bool> decisions;
  std::size_t watched_calls = 0;
  int max_depth = 0;
  Model model;                // satisfies pc (and the violation, if any)
};

struct Frame {
  std::vector<std::pair<std::string, TermId>> vars;
  TermId* find(const std::string& name) {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }
};

class Executor {
 public:
  Executor(const SourceUnit& unit, const Options& opt, TermManager& tm, std::string watched, bool check_asserts)
      : unit_(unit), opt_(opt), tm_(tm), watched_(std::move(watched)), check_asserts_(check_asserts) {}

  // One variable per dynamic nondet/UF occurrence, stable across runs.
  std::map<oracle::ValueKey, TermId> choice_vars;

  Run run(const FunctionDef& f, const std::vector<TermId>& inputs, const Pending& start, std::vector<Pending>& pending) {
    prefix_ = &start.prefix;
    pending_ = &pending;
    decisions_.clear();
    run_ = Run{};
    model_ = *start.model;
    chain_.clear();
    globals_.clear();
    uf_apps_.clear();
    depth_ = 0;
    for (auto& g : unit_.globals) globals_[g.name] = tm_.mk_const(g.init);
    try {
      call(f, inputs);
      run_.end = Run::End::Returned;
    } catch (const Blocked&) {
      run_.end = Run::End::Blocked;
    } catch (const DepthHit&) {
      run_.end = Run::End::DepthHit;
    } catch (const Violated&) {
      run_.end = Run::End::Violation;
    }
    run_.model = model_;
    run_.decisions = decisions_;
    return std::move(run_);
  }

 private:
  bool holds(TermId c) {
    model_.resize(tm_.vars().size(), 0);
    return tm_.eval(c, model_) != 0;
  }

  std::optional<Model> query(TermId extra) {
    std::vector<TermId> q = run_.pc;
    q.push_back(extra);
    auto r = vc::solve(tm_, q, opt_.solver);
    if (r.status == vc::SatStatus::Unknown) throw SolverGaveUp{};
    if (r.status == vc::SatStatus::Unsat) return std::nullopt;
    return r.model;
  }

  void take(TermId c) {
    if (tm_.is_const(c)) return;
    run_.pc.push_back(c);
    run_.conds.push_back(c);
  }

  bool decide(TermId c) {
    if (tm_.is_const(c)) return tm_.const_value(c) != 0;
    std::size_t idx = decisions_.size();
    bool dir;
    if (idx < prefix_->size()) {
      dir = (*prefix_)[idx];
    } else {
      dir = holds(c);
      auto alt = decisions_;
      alt.push_back(!dir);
      auto pc = run_.pc;
      pc.push_back(dir ? tm_.mk_not(c) : c);
      pending_->push_back({std::move(alt), std::nullopt, std::move(pc)});
    }
    decisions_.push_back(dir);
    take(dir ? c : tm_.mk_not(c));
    return dir;
  }

  void assume(TermId c) {
    if (tm_.is_const(c)) {
      if (!tm_.const_value(c)) throw Blocked{};
      return;
    }
    if (!holds(c)) {
      auto m = query(c);
      if (!m) throw Blocked{};
      model_ = *m;
    }
    take(c);
  }

  void check_assert(TermId c) {
    if (!check_asserts_) {
      assume(c);
      return;
    }
    TermId bad = tm_.mk_not(c);
    if (tm_.is_const(bad) && !tm_.const_value(bad)) return;
    std::optional<Model> m;
    if (holds(bad))
      m = model_;
    else
      m = query(bad);
    if (m) {
      model_ = *m;
      run_.pc.push_back(bad);
      throw Violated{};
    }
  }

  std::vector<TermId> call(const FunctionDef& f, const std::vector<TermId>& args) {
    if (++depth_ > opt_.depth_bound) throw DepthHit{};
    run_.max_depth = std::max(run_.max_depth, depth_);
    Frame fr;
    for (std::size_t i = 0; i < f.params.size(); ++i) fr.vars.emplace_back(f.params[i], args[i]);
    frames_.push_back(&fr);
    std::vector<TermId> ret;
    bool returned;
    try {
      returned = exec(f.body, ret);
    } catch (...) {
      frames_.pop_back();
      --depth_;
      throw;
    }
    frames_.pop_back();
    --depth_;
    if (!returned) ret.assign(static_cast<std::size_t>(f.return_slots), tm_.mk_const(0));
    return ret;
  }

  Frame& top() { return *frames_.back(); }

  TermId lookup(const std::string& name) {
    if (auto* v = top().find(name)) return *v;
    if (auto it = globals_.find(name); it != globals_.end()) return it->second;
    throw Error("symbolic executor: unknown variable " + name);
  }

  void store(const std::string& name, TermId v) {
    if (auto* slot = top().find(name)) {
      *slot = v;
      return;
    }
    if (auto it = globals_.find(name); it != globals_.end()) {
      it->second = v;
      return;
    }
    throw Error("symbolic executor: unknown variable " + name);
  }

  std::vector<TermId> invoke(const Expr& node, const Call& c) {
    std::vector<TermId> args;
    for (auto& a : c.args) args.push_back(eval(a));
    if (c.callee == watched_) ++run_.watched_calls;
    if (const FunctionDef* g = unit_.find(c.callee)) {
      chain_.push_back(&node);
      auto r = call(*g, args);
      chain_.pop_back();
      return r;
    }
    oracle::ValueKey key = chain_;
    key.push_back(&node);
    for (auto& [sym, a, res] : uf_apps_)
      if (sym == c.callee && a == args) {
        choice_vars.emplace(key, res);
        return {res};
      }
    TermId res = choice_var(key, c.callee);
    for (auto& [sym, a, r] : uf_apps_) {
      if (sym != c.callee || a.size() != args.size()) continue;
      std::vector<TermId> eqs;
      for (std::size_t k = 0; k < a.size(); ++k) eqs.push_back(tm_.mk_eq(a[k], args[k]));
      assume(tm_.mk_implies(tm_.mk_and(eqs), tm_.mk_eq(r, res)));
    }
    uf_apps_.emplace_back(c.callee, args, res);
    return {res};
  }

  TermId choice_var(const oracle::ValueKey& key, const std::string& base) {
    auto it = choice_vars.find(key);
    if (it != choice_vars.end()) return it->second;
    TermId v = tm_.mk_var(base + "#" + std::to_string(choice_vars.size()), false, key);
    choice_vars.emplace(key, v);
    return v;
  }

  TermId eval(const ExprPtr& ex) {
    return std::visit(overloaded{
                          [&](const IntLit& x) -> TermId { return tm_.mk_const(x.value); },
                          [&](const VarRef& x) -> TermId { return lookup(x.name); },
                          [&](const Unary& x) -> TermId { return vc::apply_unary(tm_, x.op, eval(x.operand)); },
                          [&](const Binary& x) -> TermId {
                            if ((x.op == BinaryOp::LogAnd || x.op == BinaryOp::LogOr) && contains_call(x.rhs)) {
                              bool l = decide(tm_.to_bool(eval(x.lhs)));
                              if (x.op == BinaryOp::LogAnd && !l) return tm_.mk_const(0);
                              if (x.op == BinaryOp::LogOr && l) return tm_.mk_const(1);
                              return tm_.to_bv(tm_.to_bool(eval(x.rhs)));
                            }
                            TermId a = eval(x.lhs);
                            TermId b = eval(x.rhs);
                            return vc::apply_binary(tm_, x.op, a, b);
                          },
                          [&](const Call& x) -> TermId { return invoke(*ex, x).at(0); },
                          [&](const Nondet&) -> TermId {
                            oracle::ValueKey key = chain_;
                            key.push_back(ex.get());
                            return choice_var(key, "nondet");
                          },
                          [&](const Intrinsic&) -> TermId {
                            throw Error("symbolic executor: leaf-store intrinsics are not supported");
                          },
                      },
                      ex->node);
  }

  bool exec(const StmtPtr& s, std::vector<TermId>& ret) {
    return std::visit(overloaded{
                          [&](const Block& x) {
                            std::size_t mark = top().vars.size();
                            for (auto& st : x.stmts)
                              if (exec(st, ret)) return true;
                            top().vars.resize(mark);
                            return false;
                          },
                          [&](const Decl& x) {
                            TermId v = x.init ? eval(x.init) : tm_.mk_const(0);
                            top().vars.emplace_back(x.name, v);
                            return false;
                          },
                          [&](const Assign& x) {
                            store(x.target, eval(x.value));
                            return false;
                          },
                          [&](const MultiAssign& x) {
                            auto vals = invoke(*x.call, std::get<Call>(x.call->node));
                            for (std::size_t i = 0; i < x.targets.size(); ++i)
                              store(x.targets[i], i < vals.size() ? vals[i] : tm_.mk_const(0));
                            return false;
                          },
                          [&](const If& x) {
                            if (decide(tm_.to_bool(eval(x.cond)))) return exec(x.then_branch, ret);
                            if (x.else_branch) return exec(x.else_branch, ret);
                            return false;
                          },
                          [&](const While&) -> bool {
                            throw Error("symbolic executor: loops must be converted to recursion first");
                          },
                          [&](const Return& x) {
                            ret.clear();
                            for (auto& v : x.values) ret.push_back(eval(v));
                            return true;
                          },
                          [&](const Assume& x) {
                            assume(tm_.to_bool(eval(x.cond)));
                            return false;
                          },
                          [&](const Assert& x) {
                            check_assert(tm_.to_bool(eval(x.cond)));
                            return false;
                          },
                          [&](const ExprStmt& x) {
                            if (auto* c = std::get_if<Call>(&x.expr->node))
                              invoke(*x.expr, *c);
                            else
                              eval(x.expr);
                            return false;
                          },
                          [&](const Record&) -> bool {
                            throw Error("symbolic executor: leaf-store records are not supported");
                          },
                      },
                      s->node);
  }

  const SourceUnit& unit_;
  const Options& opt_;
  TermManager& tm_;
  std::string watched_;
  bool check_asserts_;
  const std::vector<bool>* prefix_ = nullptr;
  std::vector<Pending>* pending_ = nullptr;
  std::vector<bool> decisions_;
  Run run_;
  Model model_;
  oracle::ValueKey chain_;
  std::map<std::string, TermId> globals_;
  std::vector<std::tuple<std::string, std::vector<TermId>, TermId>> uf_apps_;
  std::vector<Frame*> frames_;
  int depth_ = 0;
};

struct Exploration {
  std::vector<Run> runs;
  bool path_bound_hit = false;
  bool solver_gave_up = false;
};

// Explores every feasible path of `entry`; `stop` may end the search early.
template <class Stop>
Exploration explore(Executor& ex, const SourceUnit& unit, const std::string& entry, const Options& opt,
                    TermManager& tm, std::vector<TermId>& inputs, Stop stop) {
  const FunctionDef* f = unit.find(entry);
  if (!f) throw Error("unknown function " + entry);
  for (auto& p : f->params) inputs.push_back(tm.mk_var(p, false));
  Exploration out;
  std::vector<Pending> pending{{{}, Model(tm.vars().size(), 0), {}}};
  while (!pending.empty()) {
    if (out.runs.size() >= opt.path_bound) {
      out.path_bound_hit = true;
      break;
    }
    Pending next = std::move(pending.back());
    pending.pop_back();
    try {
      if (!next.model) {
        auto r = vc::solve(tm, next.pc, opt.solver);
        if (r.status == vc::SatStatus::Unknown) throw SolverGaveUp{};
        if (r.status == vc::SatStatus::Unsat) continue;
        next.model = std::move(r.model);
      }
      out.runs.push_back(ex.run(*f, inputs, next, pending));
    } catch (const SolverGaveUp&) {
      out.solver_gave_up = true;
      break;
    }
    if (stop(out.runs.back())) break;
  }
  // then-branches first, independent of the order the models led to
  std::stable_sort(out.runs.begin(), out.runs.end(), [](const Run& a, const Run& b) {
    std::size_t n = std::min(a.decisions.size(), b.decisions.size());
    for (std::size_t i = 0; i < n; ++i)
      if (a.decisions[i] != b.decisions[i]) return static_cast<bool>(a.decisions[i]);
    return a.decisions.size() < b.decisions.size();
  });
  return out;
}

ExprPtr path_pred(const TermManager& tm, const Run& r, const std::vector<std::string>& names) {
  std::vector<ExprPtr> parts;
  for (auto c : r.conds) parts.push_back(to_expr(tm, c, names));
  return conjunction(parts);
}

SourceUnit stubbed(const SourceUnit& unit, const FunctionDef& f, const transforms::SubstitutionMode& mode) {
  SourceUnit u = unit;
  u.put(transforms::substitute_calls(f, {f.name}, mode));
  transforms::add_stub(u, mode, f.params.size());
  return u;
}

SourceUnit single(const FunctionDef& f) {
  SourceUnit u;
  u.functions.push_back(f);
  return u;
}

ExprPtr preconditions(const SourceUnit& u, const std::string& entry, const Options& opt, const std::string& watched) {
  TermManager tm(opt.width);
  std::vector<TermId> inputs;
  Executor ex(u, opt, tm, watched, false);
  auto e = explore(ex, u, entry, opt, tm, inputs, [](const Run&) { return false; });
  if (e.path_bound_hit) throw PathBudgetExceeded(opt.path_bound);
  if (e.solver_gave_up) throw Error("solver budget exhausted during path enumeration");
  std::vector<ExprPtr> parts;
  const auto names = u.find(entry)->params;
  for (auto& r : e.runs)
    if (r.end == Run::End::Returned) parts.push_back(path_pred(tm, r, names));
  return disjunction(parts);
}

}  // namespace

const char* to_string(SymVerdict v) {
  switch (v) {
    case SymVerdict::Proven: return "Proven";
    case SymVerdict::Refuted: return "Refuted";
    case SymVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

ExprPtr disjunction(const std::vector<ExprPtr>& xs) {
  ExprPtr acc;
  for (auto& x : xs) {
    if (is_true_literal(x)) return mk::lit(1);
    if (is_false_literal(x)) continue;
    acc = acc ? mk::lor(acc, x) : x;
  }
  return acc ? acc : mk::lit(0);
}

ExprPtr conjunction(const std::vector<ExprPtr>& xs) {
  ExprPtr acc;
  for (auto& x : xs) {
    if (is_false_literal(x)) return mk::lit(0);
    if (is_true_literal(x)) continue;
    acc = acc ? mk::land(acc, x) : x;
  }
  return acc ? acc : mk::lit(1);
}

ExprPtr negation(const ExprPtr& e) {
  if (is_true_literal(e)) return mk::lit(0);
  if (is_false_literal(e)) return mk::lit(1);
  if (auto* u = std::get_if<Unary>(&e->node); u && u->op == UnaryOp::LogNot) {
    // !!x is x only when x is already 0/1; keep the double negation otherwise
    if (auto* b = std::get_if<Binary>(&u->operand->node)) {
      switch (b->op) {
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge:
        case BinaryOp::Eq:
        case BinaryOp::Ne:
        case BinaryOp::LogAnd:
        case BinaryOp::LogOr: return u->operand;
        default: break;
      }
    }
  }
  return mk::lnot(e);
}

ExprPtr to_expr(const TermManager& tm, TermId t, const std::vector<std::string>& names) {
  const vc::Node& n = tm.node(t);
  auto k = [&](int i) { return to_expr(tm, n.kids[static_cast<std::size_t>(i)], names); };
  auto bin = [&](BinaryOp op) { return mk::binary(op, k(0), k(1)); };
  switch (n.op) {
    case vc::Op::True: return mk::lit(1);
    case vc::Op::False: return mk::lit(0);
    case vc::Op::Const: return n.value < 0 ? mk::unary(UnaryOp::Neg, mk::lit(-n.value)) : mk::lit(n.value);
    case vc::Op::BoolVar:
    case vc::Op::BvVar: {
      auto v = static_cast<std::size_t>(n.value);
      if (v >= names.size()) throw Error("predicate mentions a non-input variable " + tm.vars()[v].name);
      return mk::var(names[v]);
    }
    case vc::Op::Not: {
      const vc::Node& c = tm.node(n.kids[0]);
      if (c.op == vc::Op::Slt) return mk::binary(BinaryOp::Ge, to_expr(tm, c.kids[0], names), to_expr(tm, c.kids[1], names));
      if (c.op == vc::Op::Sle) return mk::binary(BinaryOp::Gt, to_expr(tm, c.kids[0], names), to_expr(tm, c.kids[1], names));
      if (c.op == vc::Op::Eq && !tm.is_bool(c.kids[0]))
        return mk::binary(BinaryOp::Ne, to_expr(tm, c.kids[0], names), to_expr(tm, c.kids[1], names));
      return mk::lnot(k(0));
    }
    case vc::Op::And: return bin(BinaryOp::LogAnd);
    case vc::Op::Or: return bin(BinaryOp::LogOr);
    case vc::Op::Eq: return bin(BinaryOp::Eq);
    case vc::Op::Slt: return bin(BinaryOp::Lt);
    case vc::Op::Sle: return bin(BinaryOp::Le);
    case vc::Op::BoolIte: return mk::lor(mk::land(k(0), k(1)), mk::land(mk::lnot(k(0)), k(2)));
    case vc::Op::Ite: {
      const vc::Node& a = tm.node(n.kids[1]);
      const vc::Node& b = tm.node(n.kids[2]);
      if (a.op == vc::Op::Const && b.op == vc::Op::Const && a.value == 1 && b.value == 0) return k(0);
      if (a.op == vc::Op::Const && b.op == vc::Op::Const && a.value == 0 && b.value == 1) return mk::lnot(k(0));
      return mk::binary(BinaryOp::Add, mk::binary(BinaryOp::Mul, k(0), k(1)),
                        mk::binary(BinaryOp::Mul, mk::lnot(k(0)), k(2)));
    }
    case vc::Op::Add: return bin(BinaryOp::Add);
    case vc::Op::Sub: return bin(BinaryOp::Sub);
    case vc::Op::Mul: return bin(BinaryOp::Mul);
    case vc::Op::SDiv: return bin(BinaryOp::Div);
    case vc::Op::SRem: return bin(BinaryOp::Mod);
    case vc::Op::Neg: return mk::unary(UnaryOp::Neg, k(0));
    case vc::Op::BvAnd: return bin(BinaryOp::BitAnd);
    case vc::Op::BvOr: return bin(BinaryOp::BitOr);
    case vc::Op::BvXor: return bin(BinaryOp::BitXor);
    case vc::Op::BvNot: return mk::unary(UnaryOp::BitNot, k(0));
  }
  return mk::lit(0);
}

std::vector<PathInfo> get_all_paths(const SourceUnit& unit, const std::string& fn, const Options& opt) {
  const FunctionDef* f = unit.find(fn);
  if (!f) throw Error("unknown function " + fn);
  const auto mode = transforms::SubstitutionMode::ret_zero();
  SourceUnit u = stubbed(unit, *f, mode);
  TermManager tm(opt.width);
  std::vector<TermId> inputs;
  Executor ex(u, opt, tm, mode.symbol, false);
  auto e = explore(ex, u, fn, opt, tm, inputs, [](const Run&) { return false; });
  if (e.path_bound_hit) throw PathBudgetExceeded(opt.path_bound);
  if (e.solver_gave_up) throw Error("solver budget exhausted during path enumeration");
  std::vector<PathInfo> out;
  for (auto& r : e.runs)
    if (r.end == Run::End::Returned) out.push_back({path_pred(tm, r, f->params), r.watched_calls > 0});
  return out;
}

std::vector<PathInfo> get_all_paths(const FunctionDef& f, const Options& opt) {
  return get_all_paths(single(f), f.name, opt);
}

ExprPtr natural_base_case_precondition(const SourceUnit& unit, const std::string& fn, const Options& opt) {
  const FunctionDef* f = unit.find(fn);
  if (!f) throw Error("unknown function " + fn);
  return preconditions(stubbed(unit, *f, transforms::SubstitutionMode::assume_false()), fn, opt, "");
}

ExprPtr natural_base_case_precondition(const FunctionDef& f, const Options& opt) {
  return natural_base_case_precondition(single(f), f.name, opt);
}

ExprPtr base_case_precondition(const transforms::Instrumented& clones, const Options& opt) {
  return preconditions(clones.unit, clones.entry, opt, "");
}

SymResult symexec_equiv(const Task& task, const Options& opt) {
  TermManager tm(opt.width);
  std::vector<TermId> inputs;
  Executor ex(task.unit, opt, tm, "", true);
  SymResult res;
  bool depth_hit = false;
  auto e = explore(ex, task.unit, task.entry, opt, tm, inputs, [&](const Run& r) {
    if (r.end == Run::End::DepthHit) depth_hit = true;
    return r.end == Run::End::Violation || (depth_hit && opt.stop_at_depth_bound);
  });
  res.paths = e.runs.size();
  for (auto& r : e.runs) res.max_depth = std::max(res.max_depth, r.max_depth);
  if (!e.runs.empty() && e.runs.back().end == Run::End::Violation) {
    const Run& r = e.runs.back();
    Model m = r.model;
    m.resize(tm.vars().size(), 0);
    res.verdict = SymVerdict::Refuted;
    for (auto t : inputs) res.input.push_back(tm.eval(t, m));
    oracle::Choices ch;
    for (auto& [key, v] : ex.choice_vars) ch.values[key] = tm.eval(v, m);
    oracle::InterpOptions io;
    io.width = opt.width;
    io.fuel = 1u << 20;
    io.choices = &ch;
    auto rr = oracle::eval(task.unit, task.entry, res.input, io);
    res.replay_ok = rr.status == oracle::Status::AssertFailed;
    return res;
  }
  if (e.solver_gave_up) {
    res.verdict = SymVerdict::Inconclusive;
    res.reason = "solver budget exhausted";
  } else if (e.path_bound_hit) {
    res.verdict = SymVerdict::Inconclusive;
    res.reason = "path bound " + std::to_string(opt.path_bound) + " reached";
  } else if (depth_hit) {
    res.verdict = SymVerdict::Inconclusive;
    res.reason = "depth bound " + std::to_string(opt.depth_bound) + " reached";
  } else {
    res.verdict = SymVerdict::Proven;
  }
  return res;
}

ExprPtr interval_form(const ExprPtr& pred, const std::vector<std::string>& params, unsigned width,
                      std::size_t max_intervals) {
  if (params.size() != 1 || width > 16) return pred;
  const std::int64_t lo = bv::min_value(width), hi = bv::max_value(width);
  std::vector<std::pair<std::int64_t, std::int64_t>> runs;
  for (std::int64_t v = lo; v <= hi; ++v) {
    if (!oracle::holds(pred, params, {v}, width)) continue;
    if (!runs.empty() && runs.back().second == v - 1)
      runs.back().second = v;
    else
      runs.push_back({v, v});
    if (runs.size() > max_intervals) return pred;
  }
  if (runs.empty()) return lang::mk::lit(0);
  const auto x = [&] { return lang::mk::var(params[0]); };
  std::vector<ExprPtr> parts;
  for (auto [a, b] : runs) {
    if (a == lo && b == hi) return lang::mk::lit(1);
    if (a == b) {
      parts.push_back(lang::mk::binary(BinaryOp::Eq, x(), lang::mk::lit(a)));
    } else if (a == lo) {
      parts.push_back(lang::mk::binary(BinaryOp::Le, x(), lang::mk::lit(b)));
    } else if (b == hi) {
      parts.push_back(lang::mk::binary(BinaryOp::Ge, x(), lang::mk::lit(a)));
    } else {
      parts.push_back(lang::mk::land(lang::mk::binary(BinaryOp::Ge, x(), lang::mk::lit(a)),
                                     lang::mk::binary(BinaryOp::Le, x(), lang::mk::lit(b))));
    }
  }
  return disjunction(parts);
}

}  // namespace recveq::pathex
