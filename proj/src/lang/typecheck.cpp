#include "recveq/lang/typecheck.hpp"

#include <algorithm>
#include <set>

#include "recveq/common.hpp"

namespace recveq::lang {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void fail(const std::string& kind, const std::string& msg, SourcePos pos) {
  throw FrontendError(kind, msg, pos.line, pos.column);
}

class Checker {
 public:
  Checker(const SourceUnit& unit, const FunctionDef& f) : unit_(unit), f_(f) {}

  void run() {
    scopes_.emplace_back();
    for (auto& g : unit_.globals) globals_.insert(g.name);
    for (auto& p : f_.params) declare(p, f_.pos);
    stmt(f_.body, false);
    if (!always_returns(f_.body)) fail("MissingReturn", "function '" + f_.name + "' may end without return", f_.pos);
  }

 private:
  void declare(const std::string& name, SourcePos pos) {
    if (scopes_.back().count(name)) fail("DuplicateName", "'" + name + "' declared twice", pos);
    scopes_.back().insert(name);
  }

  bool visible(const std::string& name) const {
    if (globals_.count(name)) return true;
    return std::any_of(scopes_.begin(), scopes_.end(), [&](auto& s) { return s.count(name) > 0; });
  }

  void use(const std::string& name, SourcePos pos) {
    if (!visible(name)) fail("UndefinedVariable", "'" + name + "' is not declared", pos);
  }

  // Returns the callee's slot count.
  int call(const Call& c, SourcePos pos) {
    for (auto& a : c.args) expr(a);
    std::size_t arity = 0;
    int slots = 1;
    if (auto* g = unit_.find(c.callee)) {
      arity = g->params.size();
      slots = g->return_slots;
    } else if (auto* uf = unit_.find_uf(c.callee)) {
      arity = uf->arity;
    } else {
      fail("UndefinedCallee", "call to undefined function '" + c.callee + "'", pos);
    }
    if (arity != c.args.size())
      fail("ArityMismatch",
           "'" + c.callee + "' expects " + std::to_string(arity) + " arguments, got " + std::to_string(c.args.size()),
           pos);
    return slots;
  }

  void expr(const ExprPtr& e) {
    std::visit(overloaded{
                   [&](const IntLit&) {},
                   [&](const VarRef& x) { use(x.name, e->pos); },
                   [&](const Unary& x) { expr(x.operand); },
                   [&](const Binary& x) {
                     expr(x.lhs);
                     expr(x.rhs);
                   },
                   [&](const Call& x) {
                     if (call(x, e->pos) != 1)
                       fail("ArityMismatch", "'" + x.callee + "' returns several values", e->pos);
                   },
                   [&](const Nondet&) {},
                   [&](const Intrinsic&) {},
               },
               e->node);
  }

  void stmt(const StmtPtr& s, bool nested_scope) {
    std::visit(overloaded{
                   [&](const Block& x) {
                     if (nested_scope) scopes_.emplace_back();
                     for (auto& st : x.stmts) stmt(st, true);
                     if (nested_scope) scopes_.pop_back();
                   },
                   [&](const Decl& x) {
                     if (x.init) expr(x.init);
                     declare(x.name, s->pos);
                   },
                   [&](const Assign& x) {
                     use(x.target, s->pos);
                     expr(x.value);
                   },
                   [&](const MultiAssign& x) {
                     for (auto& t : x.targets) use(t, s->pos);
                     auto& c = std::get<Call>(x.call->node);
                     int slots = call(c, s->pos);
                     if (slots != static_cast<int>(x.targets.size()))
                       fail("ArityMismatch", "'" + c.callee + "' returns " + std::to_string(slots) + " values", s->pos);
                   },
                   [&](const If& x) {
                     expr(x.cond);
                     scoped(x.then_branch);
                     if (x.else_branch) scoped(x.else_branch);
                   },
                   [&](const While& x) {
                     expr(x.cond);
                     scoped(x.body);
                   },
                   [&](const Return& x) {
                     for (auto& v : x.values) expr(v);
                     if (static_cast<int>(x.values.size()) != f_.return_slots)
                       fail("ArityMismatch", "inconsistent number of returned values", s->pos);
                   },
                   [&](const Assume& x) { expr(x.cond); },
                   [&](const Assert& x) { expr(x.cond); },
                   [&](const ExprStmt& x) {
                     if (auto* c = std::get_if<Call>(&x.expr->node))
                       call(*c, s->pos);
                     else
                       expr(x.expr);
                   },
                   [&](const Record& x) {
                     for (auto& v : x.values) expr(v);
                   },
               },
               s->node);
  }

  void scoped(const StmtPtr& s) {
    scopes_.emplace_back();
    stmt(s, false);
    scopes_.pop_back();
  }

  const SourceUnit& unit_;
  const FunctionDef& f_;
  std::vector<std::set<std::string>> scopes_;
  std::set<std::string> globals_;
};

}  // namespace

bool always_returns(const StmtPtr& s) {
  return std::visit(overloaded{
                        [](const Block& x) { return std::any_of(x.stmts.begin(), x.stmts.end(), always_returns); },
                        [](const If& x) {
                          return x.else_branch && always_returns(x.then_branch) && always_returns(x.else_branch);
                        },
                        [](const Return&) { return true; },
                        [](const Assume& x) { return is_false_literal(x.cond); },
                        [](const auto&) { return false; },
                    },
                    s->node);
}

void typecheck(const SourceUnit& unit) {
  std::set<std::string> names;
  for (auto& f : unit.functions)
    if (!names.insert(f.name).second) fail("DuplicateName", "function '" + f.name + "' defined twice", f.pos);
  for (auto& uf : unit.ufs)
    if (!names.insert(uf.name).second) fail("DuplicateName", "function '" + uf.name + "' defined twice", {});
  for (auto& f : unit.functions) Checker(unit, f).run();
  call_graph(unit);
}

std::vector<CallSite> recursive_call_sites(const FunctionDef& f) {
  std::vector<CallSite> out;
  visit_calls(f.body, [&](const Call& c) {
    if (c.callee == f.name) out.push_back({static_cast<int>(out.size()), c.callee, c.args});
  });
  return out;
}

FunctionDef number_self_calls(const FunctionDef& f) {
  std::map<const Call*, int> index;
  visit_calls(f.body, [&](const Call& c) {
    if (c.callee == f.name) index.emplace(&c, static_cast<int>(index.size()));
  });
  FunctionDef out = f;
  out.body = map_stmt_exprs(f.body, [&](const ExprPtr& e) {
    return map_expr(e, [&](const ExprPtr& original, const ExprPtr& rebuilt) -> ExprPtr {
      auto* c = std::get_if<Call>(&original->node);
      if (!c) return nullptr;
      auto it = index.find(c);
      if (it == index.end()) return nullptr;
      return std::make_shared<Expr>(Expr{Call{c->callee, std::get<Call>(rebuilt->node).args, it->second}, original->pos});
    });
  });
  return out;
}

bool CallGraph::has_edge(const std::string& from, const std::string& to) const {
  auto it = edges.find(from);
  return it != edges.end() && std::find(it->second.begin(), it->second.end(), to) != it->second.end();
}

CallGraph call_graph(const SourceUnit& unit) {
  CallGraph g;
  for (auto& f : unit.functions) {
    g.nodes.push_back(f.name);
    auto& out = g.edges[f.name];
    visit_calls(f.body, [&](const Call& c) {
      if (unit.find(c.callee) && std::find(out.begin(), out.end(), c.callee) == out.end()) out.push_back(c.callee);
    });
  }
  // Post-order DFS; a back edge to a node on the stack (other than itself) is mutual recursion.
  std::map<std::string, int> state;  // 0 new, 1 on stack, 2 done
  std::function<void(const std::string&)> dfs = [&](const std::string& n) {
    state[n] = 1;
    for (auto& m : g.edges[n]) {
      if (m == n) continue;
      if (state[m] == 1) {
        const FunctionDef* f = unit.find(n);
        fail("MutualRecursionUnsupported", "'" + n + "' and '" + m + "' call each other", f ? f->pos : SourcePos{});
      }
      if (state[m] == 0) dfs(m);
    }
    state[n] = 2;
    g.bottom_up.push_back(n);
  };
  for (auto& n : g.nodes)
    if (state[n] == 0) dfs(n);
  return g;
}

}  // namespace recveq::lang
