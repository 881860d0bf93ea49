#include "recveq/oracle.hpp"

#include <algorithm>
#include <set>

#include "recveq/common.hpp"

namespace recveq::oracle {

using namespace lang;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct OutOfFuel {};
struct BlockedRun {};
struct AssertViolated {};

struct Frame {
  std::vector<std::pair<std::string, std::int64_t>> vars;

  std::int64_t* find(const std::string& name) {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }
};

class Machine {
 public:
  Machine(const SourceUnit& unit, const InterpOptions& opt, EvalResult& res) : unit_(unit), opt_(opt), res_(res) {
    for (auto& g : unit.globals) res_.globals[g.name] = bv::wrap(g.init, opt.width);
  }

  std::vector<std::int64_t> call(const FunctionDef& f, const std::vector<std::int64_t>& args, int depth) {
    burn();
    if (opt_.trace) res_.trace.push_back({depth, f.name, args});
    Frame frame;
    for (std::size_t i = 0; i < f.params.size(); ++i) frame.vars.emplace_back(f.params[i], args[i]);
    std::vector<std::int64_t> ret;
    if (!exec(f.body, frame, ret, depth)) ret.assign(static_cast<std::size_t>(f.return_slots), 0);
    return ret;
  }

 private:
  void burn() {
    if (res_.fuel_used >= opt_.fuel) throw OutOfFuel{};
    ++res_.fuel_used;
  }

  std::int64_t lookup(const std::string& name, Frame& fr) {
    if (auto* v = fr.find(name)) return *v;
    if (auto it = res_.globals.find(name); it != res_.globals.end()) return it->second;
    throw Error("interpreter: unknown variable " + name);
  }

  void store(const std::string& name, std::int64_t v, Frame& fr) {
    if (auto* slot = fr.find(name)) {
      *slot = v;
      return;
    }
    if (auto it = res_.globals.find(name); it != res_.globals.end()) {
      it->second = v;
      return;
    }
    throw Error("interpreter: unknown variable " + name);
  }

  std::int64_t choice(const void* node) {
    ValueKey key = chain_;
    key.push_back(node);
    if (opt_.choices) {
      auto it = opt_.choices->values.find(key);
      if (it != opt_.choices->values.end()) return bv::wrap(it->second, opt_.width);
      return bv::wrap(opt_.choices->fallback, opt_.width);
    }
    return 0;
  }

  std::vector<std::int64_t> invoke(const Expr& node, const Call& c, Frame& fr, int depth) {
    std::vector<std::int64_t> args;
    for (auto& a : c.args) args.push_back(eval(a, fr, depth));
    if (const FunctionDef* g = unit_.find(c.callee)) {
      chain_.push_back(&node);
      auto r = call(*g, args, depth + 1);
      chain_.pop_back();
      return r;
    }
    return {choice(&node)};
  }

  std::int64_t eval(const ExprPtr& e, Frame& fr, int depth) {
    const unsigned w = opt_.width;
    return std::visit(
        overloaded{
            [&](const IntLit& x) -> std::int64_t { return bv::wrap(x.value, w); },
            [&](const VarRef& x) -> std::int64_t { return lookup(x.name, fr); },
            [&](const Unary& x) -> std::int64_t {
              std::int64_t v = eval(x.operand, fr, depth);
              switch (x.op) {
                case UnaryOp::Neg: return bv::neg(v, w);
                case UnaryOp::LogNot: return v == 0;
                case UnaryOp::BitNot: return bv::wrap(~v, w);
              }
              return 0;
            },
            [&](const Binary& x) -> std::int64_t {
              if (x.op == BinaryOp::LogAnd) return eval(x.lhs, fr, depth) != 0 && eval(x.rhs, fr, depth) != 0;
              if (x.op == BinaryOp::LogOr) return eval(x.lhs, fr, depth) != 0 || eval(x.rhs, fr, depth) != 0;
              std::int64_t a = eval(x.lhs, fr, depth);
              std::int64_t b = eval(x.rhs, fr, depth);
              switch (x.op) {
                case BinaryOp::Add: return bv::add(a, b, w);
                case BinaryOp::Sub: return bv::sub(a, b, w);
                case BinaryOp::Mul: return bv::mul(a, b, w);
                case BinaryOp::Div: return bv::sdiv(a, b, w);
                case BinaryOp::Mod: return bv::srem(a, b, w);
                case BinaryOp::Lt: return a < b;
                case BinaryOp::Le: return a <= b;
                case BinaryOp::Gt: return a > b;
                case BinaryOp::Ge: return a >= b;
                case BinaryOp::Eq: return a == b;
                case BinaryOp::Ne: return a != b;
                case BinaryOp::BitAnd: return bv::wrap(a & b, w);
                case BinaryOp::BitOr: return bv::wrap(a | b, w);
                case BinaryOp::BitXor: return bv::wrap(a ^ b, w);
                default: return 0;
              }
            },
            [&](const Call& x) -> std::int64_t { return invoke(*e, x, fr, depth).at(0); },
            [&](const Nondet&) -> std::int64_t { return choice(e.get()); },
            [&](const Intrinsic& x) -> std::int64_t {
              if (x.kind == IntrinsicKind::LeavesEqual) return leaves_equal(res_.records[x.a], res_.records[x.b]);
              return static_cast<std::int64_t>(res_.records[x.a].size()) >= x.b;
            },
        },
        e->node);
  }

  // Returns true when the statement executed a return.
  bool exec(const StmtPtr& s, Frame& fr, std::vector<std::int64_t>& ret, int depth) {
    return std::visit(
        overloaded{
            [&](const Block& x) {
              std::size_t mark = fr.vars.size();
              for (auto& st : x.stmts) {
                if (exec(st, fr, ret, depth)) return true;
              }
              fr.vars.resize(mark);
              return false;
            },
            [&](const Decl& x) {
              std::int64_t v = x.init ? eval(x.init, fr, depth) : 0;
              fr.vars.emplace_back(x.name, v);
              return false;
            },
            [&](const Assign& x) {
              store(x.target, eval(x.value, fr, depth), fr);
              return false;
            },
            [&](const MultiAssign& x) {
              auto vals = invoke(*x.call, std::get<Call>(x.call->node), fr, depth);
              for (std::size_t i = 0; i < x.targets.size(); ++i) store(x.targets[i], i < vals.size() ? vals[i] : 0, fr);
              return false;
            },
            [&](const If& x) {
              if (eval(x.cond, fr, depth) != 0) return exec(x.then_branch, fr, ret, depth);
              if (x.else_branch) return exec(x.else_branch, fr, ret, depth);
              return false;
            },
            [&](const While& x) {
              for (;;) {
                burn();
                if (eval(x.cond, fr, depth) == 0) return false;
                if (exec(x.body, fr, ret, depth)) return true;
              }
            },
            [&](const Return& x) {
              ret.clear();
              for (auto& v : x.values) ret.push_back(eval(v, fr, depth));
              return true;
            },
            [&](const Assume& x) {
              if (eval(x.cond, fr, depth) == 0) throw BlockedRun{};
              return false;
            },
            [&](const Assert& x) {
              if (eval(x.cond, fr, depth) == 0) throw AssertViolated{};
              return false;
            },
            [&](const ExprStmt& x) {
              if (auto* c = std::get_if<Call>(&x.expr->node))
                invoke(*x.expr, *c, fr, depth);
              else
                eval(x.expr, fr, depth);
              return false;
            },
            [&](const Record& x) {
              std::vector<std::int64_t> vals;
              for (auto& v : x.values) vals.push_back(eval(v, fr, depth));
              res_.records[x.store].push_back(std::move(vals));
              return false;
            },
        },
        s->node);
  }

  const SourceUnit& unit_;
  InterpOptions opt_;
  EvalResult& res_;
  ValueKey chain_;
};

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::Value: return "Value";
    case Status::NonTermination: return "NonTermination";
    case Status::Blocked: return "Blocked";
    case Status::AssertFailed: return "AssertFailed";
  }
  return "?";
}

EvalResult eval(const SourceUnit& unit, const std::string& fn, const std::vector<std::int64_t>& args,
                const InterpOptions& options) {
  const FunctionDef* f = unit.find(fn);
  if (!f) throw Error("eval: unknown function " + fn);
  if (f->params.size() != args.size()) throw Error("eval: arity mismatch for " + fn);
  EvalResult res;
  Machine m(unit, options, res);
  std::vector<std::int64_t> wrapped;
  for (auto a : args) wrapped.push_back(bv::wrap(a, options.width));
  try {
    res.values = m.call(*f, wrapped, 0);
    res.status = Status::Value;
  } catch (const OutOfFuel&) {
    res.status = Status::NonTermination;
  } catch (const BlockedRun&) {
    res.status = Status::Blocked;
  } catch (const AssertViolated&) {
    res.status = Status::AssertFailed;
  }
  return res;
}

EvalResult eval(const FunctionDef& f, const std::vector<std::int64_t>& args, std::size_t fuel, unsigned width) {
  SourceUnit u;
  u.functions.push_back(f);
  InterpOptions opt;
  opt.fuel = fuel;
  opt.width = width;
  return eval(u, f.name, args, opt);
}

bool holds(const ExprPtr& pred, const std::vector<std::string>& params, const std::vector<std::int64_t>& args,
           unsigned width) {
  FunctionDef f;
  f.name = "__rv_pred";
  f.params = params;
  f.body = mk::block({mk::ret(pred)});
  auto r = eval(f, args, 1, width);
  return r.terminated() && r.value() != 0;
}

bool leaves_equal(const std::vector<std::vector<std::int64_t>>& a, const std::vector<std::vector<std::int64_t>>& b) {
  auto tuples = [](const std::vector<std::vector<std::int64_t>>& recs) {
    std::set<std::vector<std::int64_t>> out;
    for (auto& r : recs) out.insert(std::vector<std::int64_t>(r.begin() + std::min<std::size_t>(2, r.size()), r.end()));
    return out;
  };
  return tuples(a) == tuples(b);
}

void for_each_input(std::size_t arity, const DomainSpec& d,
                    const std::function<bool(const std::vector<std::int64_t>&)>& fn) {
  std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
  for (std::size_t i = 0; i < arity; ++i) {
    if (i < d.ranges.size())
      ranges.push_back(d.ranges[i]);
    else
      ranges.emplace_back(bv::min_value(d.width), bv::max_value(d.width));
  }
  for (auto& r : ranges)
    if (r.first > r.second) return;
  std::vector<std::int64_t> cur;
  for (auto& r : ranges) cur.push_back(r.first);
  for (;;) {
    if (!fn(cur)) return;
    std::size_t i = arity;
    while (i > 0) {
      --i;
      if (cur[i] < ranges[i].second) {
        ++cur[i];
        break;
      }
      cur[i] = ranges[i].first;
      if (i == 0) return;
    }
    if (arity == 0) return;
  }
}

EquivResult brute_force_equiv(const SourceUnit& u1, const std::string& f1, const SourceUnit& u2, const std::string& f2,
                              const DomainSpec& d) {
  const FunctionDef* a = u1.find(f1);
  const FunctionDef* b = u2.find(f2);
  if (!a || !b) throw Error("brute_force_equiv: unknown function");
  if (a->params.size() != b->params.size()) throw Error("brute_force_equiv: arity mismatch");
  InterpOptions opt;
  opt.width = d.width;
  opt.fuel = d.fuel;
  EquivResult out;
  for_each_input(a->params.size(), d, [&](const std::vector<std::int64_t>& in) {
    ++out.checked;
    auto r1 = eval(u1, f1, in, opt);
    auto r2 = eval(u2, f2, in, opt);
    if (r1.status == Status::NonTermination || r2.status == Status::NonTermination) {
      out.fuel_limited.push_back(in);
      return true;
    }
    if (r1.terminated() && r2.terminated() && r1.values != r2.values) {
      out.equivalent = false;
      out.input = in;
      out.v1 = r1.value();
      out.v2 = r2.value();
      return false;
    }
    return true;
  });
  return out;
}

EquivResult brute_force_equiv(const FunctionDef& f1, const FunctionDef& f2, const DomainSpec& d) {
  SourceUnit u1, u2;
  u1.functions.push_back(f1);
  u2.functions.push_back(f2);
  return brute_force_equiv(u1, f1.name, u2, f2.name, d);
}

}  // namespace recveq::oracle
