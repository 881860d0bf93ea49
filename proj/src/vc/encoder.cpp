#include "recveq/vc/encoder.hpp"

#include <algorithm>
#include <map>

#include "recveq/common.hpp"

namespace recveq::vc {

using namespace lang;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct Frame {
  std::vector<std::pair<std::string, TermId>> vars;
  TermId done;
  std::vector<TermId> rets;

  TermId* find(const std::string& name) {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }
};

struct StoredRecord {
  TermId guard;
  std::vector<TermId> values;
};

class Encoder {
 public:
  Encoder(const SourceUnit& unit, Encoding& out) : unit_(unit), out_(out), tm_(*out.tm) {
    halted_ = tm_.mk_false();
    for (auto& g : unit.globals) globals_[g.name] = tm_.mk_const(g.init);
  }

  void run(const FunctionDef& f) {
    for (auto& p : f.params) out_.inputs.push_back(tm_.mk_var(p, false));
    auto rets = call(f, out_.inputs, tm_.mk_true());
    out_.returns = rets.first;
    out_.returned = rets.second;
    out_.violation = halted_;
    for (std::size_t i = 0; i < out_.uf_apps.size(); ++i)
      for (std::size_t j = i + 1; j < out_.uf_apps.size(); ++j) {
        const UfApp& a = out_.uf_apps[i];
        const UfApp& b = out_.uf_apps[j];
        if (a.symbol != b.symbol || a.args.size() != b.args.size()) continue;
        std::vector<TermId> eqs;
        for (std::size_t k = 0; k < a.args.size(); ++k) eqs.push_back(tm_.mk_eq(a.args[k], b.args[k]));
        TermId c = tm_.mk_implies(tm_.mk_and(eqs), tm_.mk_eq(a.result, b.result));
        if (c != tm_.mk_true()) out_.congruence.push_back(c);
      }
  }

 private:
  // Returns the return slots and the guard under which the frame returned.
  std::pair<std::vector<TermId>, TermId> call(const FunctionDef& f, const std::vector<TermId>& args, TermId guard) {
    if (std::find(stack_.begin(), stack_.end(), f.name) != stack_.end())
      throw NotFlat("NotFlat: recursive call to '" + f.name + "'");
    stack_.push_back(f.name);
    Frame fr;
    fr.done = tm_.mk_false();
    fr.rets.assign(static_cast<std::size_t>(f.return_slots), tm_.mk_const(0));
    for (std::size_t i = 0; i < f.params.size(); ++i) fr.vars.emplace_back(f.params[i], args[i]);
    frames_.push_back(&fr);
    exec(f.body, guard);
    frames_.pop_back();
    stack_.pop_back();
    return {fr.rets, fr.done};
  }

  Frame& top() { return *frames_.back(); }

  TermId active(TermId g) { return tm_.mk_and(tm_.mk_and(g, tm_.mk_not(top().done)), tm_.mk_not(halted_)); }

  TermId lookup(const std::string& name) {
    if (auto* v = top().find(name)) return *v;
    if (auto it = globals_.find(name); it != globals_.end()) return it->second;
    throw Error("encoder: unknown variable " + name);
  }

  void store(const std::string& name, TermId v, TermId e) {
    if (auto* slot = top().find(name)) {
      *slot = tm_.mk_ite(e, v, *slot);
      return;
    }
    if (auto it = globals_.find(name); it != globals_.end()) {
      it->second = tm_.mk_ite(e, v, it->second);
      return;
    }
    throw Error("encoder: unknown variable " + name);
  }

  oracle::ValueKey key_for(const void* node) {
    oracle::ValueKey k = chain_;
    k.push_back(node);
    return k;
  }

  std::vector<TermId> invoke(const Expr& node, const Call& c, TermId e) {
    std::vector<TermId> args;
    for (auto& a : c.args) args.push_back(eval(a, e));
    if (const FunctionDef* g = unit_.find(c.callee)) {
      chain_.push_back(&node);
      auto r = call(*g, args, e);
      chain_.pop_back();
      return r.first;
    }
    for (auto& app : out_.uf_apps)
      if (app.symbol == c.callee && app.args == args) {
        app.keys.push_back(key_for(&node));
        return {app.result};
      }
    UfApp app;
    app.symbol = c.callee;
    app.args = args;
    app.result = tm_.mk_var(c.callee + "#" + std::to_string(out_.uf_apps.size()), false);
    app.keys.push_back(key_for(&node));
    out_.uf_apps.push_back(app);
    return {app.result};
  }

  TermId leaves_equal(int a, int b) {
    auto& ra = records_[a];
    auto& rb = records_[b];
    auto covered = [&](const std::vector<StoredRecord>& from, const std::vector<StoredRecord>& to) {
      std::vector<TermId> all;
      for (auto& r : from) {
        std::vector<TermId> options;
        for (auto& s : to) {
          if (s.values.size() != r.values.size()) continue;
          std::vector<TermId> eqs{s.guard};
          for (std::size_t k = 2; k < r.values.size(); ++k) eqs.push_back(tm_.mk_eq(r.values[k], s.values[k]));
          options.push_back(tm_.mk_and(eqs));
        }
        all.push_back(tm_.mk_implies(r.guard, tm_.mk_or(options)));
      }
      return tm_.mk_and(all);
    };
    return tm_.mk_and(covered(ra, rb), covered(rb, ra));
  }

  TermId size_at_least(int store, int m) {
    if (m <= 0) return tm_.mk_true();
    auto& rs = records_[store];
    // at_least[j]: at least j of the records seen so far are present
    std::vector<TermId> at_least(static_cast<std::size_t>(m) + 1, tm_.mk_false());
    at_least[0] = tm_.mk_true();
    for (auto& r : rs)
      for (std::size_t j = static_cast<std::size_t>(m); j >= 1; --j)
        at_least[j] = tm_.mk_or(at_least[j], tm_.mk_and(r.guard, at_least[j - 1]));
    return at_least[static_cast<std::size_t>(m)];
  }

  TermId eval(const ExprPtr& ex, TermId e) {
    return std::visit(overloaded{
                          [&](const IntLit& x) -> TermId { return tm_.mk_const(x.value); },
                          [&](const VarRef& x) -> TermId { return lookup(x.name); },
                          [&](const Unary& x) -> TermId { return apply_unary(tm_, x.op, eval(x.operand, e)); },
                          [&](const Binary& x) -> TermId {
                            if (x.op == BinaryOp::LogAnd || x.op == BinaryOp::LogOr) {
                              TermId l = tm_.to_bool(eval(x.lhs, e));
                              TermId g = x.op == BinaryOp::LogAnd ? tm_.mk_and(e, l) : tm_.mk_and(e, tm_.mk_not(l));
                              TermId r = tm_.to_bool(eval(x.rhs, g));
                              return tm_.to_bv(x.op == BinaryOp::LogAnd ? tm_.mk_and(l, r) : tm_.mk_or(l, r));
                            }
                            TermId a = eval(x.lhs, e);
                            TermId b = eval(x.rhs, e);
                            return apply_binary(tm_, x.op, a, b);
                          },
                          [&](const Call& x) -> TermId { return invoke(*ex, x, e).at(0); },
                          [&](const Nondet&) -> TermId {
                            TermId v = tm_.mk_var("nondet#" + std::to_string(out_.nondets.size()), false);
                            out_.nondets.emplace_back(key_for(ex.get()), v);
                            return v;
                          },
                          [&](const Intrinsic& x) -> TermId {
                            if (x.kind == IntrinsicKind::LeavesEqual) return tm_.to_bv(leaves_equal(x.a, x.b));
                            return tm_.to_bv(size_at_least(x.a, x.b));
                          },
                      },
                      ex->node);
  }

  void exec(const StmtPtr& s, TermId g) {
    std::visit(overloaded{
                   [&](const Block& x) {
                     std::size_t mark = top().vars.size();
                     for (auto& st : x.stmts) exec(st, g);
                     top().vars.resize(mark);
                   },
                   [&](const Decl& x) {
                     TermId e = active(g);
                     TermId v = x.init ? eval(x.init, e) : tm_.mk_const(0);
                     top().vars.emplace_back(x.name, v);
                   },
                   [&](const Assign& x) {
                     TermId e = active(g);
                     store(x.target, eval(x.value, e), e);
                   },
                   [&](const MultiAssign& x) {
                     TermId e = active(g);
                     auto vals = invoke(*x.call, std::get<Call>(x.call->node), e);
                     for (std::size_t i = 0; i < x.targets.size(); ++i)
                       store(x.targets[i], i < vals.size() ? vals[i] : tm_.mk_const(0), e);
                   },
                   [&](const If& x) {
                     TermId e = active(g);
                     TermId c = tm_.to_bool(eval(x.cond, e));
                     exec(x.then_branch, tm_.mk_and(e, c));
                     if (x.else_branch) exec(x.else_branch, tm_.mk_and(e, tm_.mk_not(c)));
                   },
                   [&](const While&) { throw NotFlat("NotFlat: loop in flat program"); },
                   [&](const Return& x) {
                     TermId e = active(g);
                     Frame& fr = top();
                     std::vector<TermId> vals;
                     for (auto& v : x.values) vals.push_back(eval(v, e));
                     if (fr.rets.size() < vals.size()) fr.rets.resize(vals.size(), tm_.mk_const(0));
                     for (std::size_t i = 0; i < fr.rets.size(); ++i)
                       fr.rets[i] = tm_.mk_ite(e, i < vals.size() ? vals[i] : tm_.mk_const(0), fr.rets[i]);
                     fr.done = tm_.mk_or(fr.done, e);
                   },
                   [&](const Assume& x) {
                     TermId e = active(g);
                     TermId c = tm_.to_bool(eval(x.cond, e));
                     TermId k = tm_.mk_implies(e, c);
                     if (k != tm_.mk_true()) out_.constraints.push_back(k);
                   },
                   [&](const Assert& x) {
                     TermId e = active(g);
                     TermId c = tm_.to_bool(eval(x.cond, e));
                     halted_ = tm_.mk_or(halted_, tm_.mk_and(e, tm_.mk_not(c)));
                   },
                   [&](const ExprStmt& x) {
                     TermId e = active(g);
                     if (auto* c = std::get_if<Call>(&x.expr->node))
                       invoke(*x.expr, *c, e);
                     else
                       eval(x.expr, e);
                   },
                   [&](const Record& x) {
                     TermId e = active(g);
                     std::vector<TermId> vals;
                     for (auto& v : x.values) vals.push_back(eval(v, e));
                     records_[x.store].push_back({e, std::move(vals)});
                   },
               },
               s->node);
  }

  const SourceUnit& unit_;
  Encoding& out_;
  TermManager& tm_;
  TermId halted_;
  std::map<std::string, TermId> globals_;
  std::map<int, std::vector<StoredRecord>> records_;
  std::vector<Frame*> frames_;
  std::vector<std::string> stack_;
  oracle::ValueKey chain_;
};

}  // namespace

std::vector<TermId> Encoding::query() const {
  std::vector<TermId> q = constraints;
  q.insert(q.end(), congruence.begin(), congruence.end());
  q.push_back(violation);
  return q;
}

TermId apply_binary(TermManager& tm, BinaryOp op, TermId a, TermId b) {
  switch (op) {
    case BinaryOp::Add: return tm.mk_add(a, b);
    case BinaryOp::Sub: return tm.mk_sub(a, b);
    case BinaryOp::Mul: return tm.mk_mul(a, b);
    case BinaryOp::Div: return tm.mk_sdiv(a, b);
    case BinaryOp::Mod: return tm.mk_srem(a, b);
    case BinaryOp::Lt: return tm.to_bv(tm.mk_slt(a, b));
    case BinaryOp::Le: return tm.to_bv(tm.mk_sle(a, b));
    case BinaryOp::Gt: return tm.to_bv(tm.mk_slt(b, a));
    case BinaryOp::Ge: return tm.to_bv(tm.mk_sle(b, a));
    case BinaryOp::Eq: return tm.to_bv(tm.mk_eq(a, b));
    case BinaryOp::Ne: return tm.to_bv(tm.mk_not(tm.mk_eq(a, b)));
    case BinaryOp::LogAnd: return tm.to_bv(tm.mk_and(tm.to_bool(a), tm.to_bool(b)));
    case BinaryOp::LogOr: return tm.to_bv(tm.mk_or(tm.to_bool(a), tm.to_bool(b)));
    case BinaryOp::BitAnd: return tm.mk_bvand(a, b);
    case BinaryOp::BitOr: return tm.mk_bvor(a, b);
    case BinaryOp::BitXor: return tm.mk_bvxor(a, b);
  }
  return a;
}

TermId apply_unary(TermManager& tm, UnaryOp op, TermId a) {
  switch (op) {
    case UnaryOp::Neg: return tm.mk_neg(a);
    case UnaryOp::LogNot: return tm.to_bv(tm.mk_not(tm.to_bool(a)));
    case UnaryOp::BitNot: return tm.mk_bvnot(a);
  }
  return a;
}

Encoding encode_flat(const FlatProgram& p, unsigned width) {
  const FunctionDef* f = p.unit.find(p.entry);
  if (!f) throw Error("encode_flat: unknown entry " + p.entry);
  Encoding enc;
  enc.tm = std::make_shared<TermManager>(width);
  Encoder(p.unit, enc).run(*f);
  return enc;
}

const char* to_string(Validity v) {
  switch (v) {
    case Validity::Valid: return "Valid";
    case Validity::Counterexample: return "Counterexample";
    case Validity::Inconclusive: return "Inconclusive";
  }
  return "?";
}

oracle::Choices choices_from_model(const Encoding& enc, const std::vector<std::int64_t>& model) {
  oracle::Choices ch;
  const TermManager& tm = *enc.tm;
  auto value_of = [&](TermId t) { return tm.eval(t, model); };
  for (auto& [key, v] : enc.nondets) ch.values[key] = value_of(v);
  for (auto& app : enc.uf_apps)
    for (auto& key : app.keys) ch.values[key] = value_of(app.result);
  return ch;
}

CheckResult check_valid(const FlatProgram& p, const CheckOptions& opt) {
  CheckResult res;
  Encoding enc = encode_flat(p, opt.width);
  auto q = enc.query();
  SolveResult sr;
  try {
    sr = solve(*enc.tm, q, opt.solver);
  } catch (const BudgetExceeded& e) {
    res.verdict = Validity::Inconclusive;
    res.note = e.what();
    return res;
  }
  res.free_bits = sr.free_bits;
  res.engine = sr.engine;
  if (sr.status == SatStatus::Unsat) {
    res.verdict = Validity::Valid;
    return res;
  }
  if (sr.status == SatStatus::Unknown) {
    res.verdict = Validity::Inconclusive;
    res.note = "solver budget exhausted";
    return res;
  }
  res.verdict = Validity::Counterexample;
  for (auto t : enc.inputs) res.inputs.push_back(enc.tm->eval(t, sr.model));
  res.choices = choices_from_model(enc, sr.model);
  oracle::InterpOptions io;
  io.width = opt.width;
  io.fuel = 1u << 20;
  io.choices = &res.choices;
  auto r = oracle::eval(p.unit, p.entry, res.inputs, io);
  res.replay_ok = r.status == oracle::Status::AssertFailed;
  ++backend_stats().replays;
  if (!res.replay_ok) {
    ++backend_stats().replay_failures;
    res.note = std::string("replay ended in ") + oracle::to_string(r.status);
  }
  return res;
}

}  // namespace recveq::vc
