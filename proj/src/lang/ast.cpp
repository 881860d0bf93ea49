#include "recveq/lang/ast.hpp"

#include <algorithm>
#include <unordered_map>

namespace recveq::lang {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

ExprPtr make(decltype(Expr::node) n, SourcePos pos = {}) {
  return std::make_shared<const Expr>(Expr{std::move(n), pos});
}
StmtPtr make_stmt(decltype(Stmt::node) n, SourcePos pos = {}) {
  return std::make_shared<const Stmt>(Stmt{std::move(n), pos});
}

}  // namespace

const FunctionDef* SourceUnit::find(std::string_view name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

FunctionDef* SourceUnit::find(std::string_view name) {
  for (auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

const UfDecl* SourceUnit::find_uf(std::string_view name) const {
  for (const auto& u : ufs)
    if (u.name == name) return &u;
  return nullptr;
}

bool SourceUnit::has_name(std::string_view name) const {
  if (find(name) || find_uf(name)) return true;
  return std::any_of(globals.begin(), globals.end(), [&](const GlobalDecl& g) { return g.name == name; });
}

void SourceUnit::put(FunctionDef f) {
  if (auto* existing = find(f.name)) {
    *existing = std::move(f);
    return;
  }
  functions.push_back(std::move(f));
}

void SourceUnit::put_uf(UfDecl uf) {
  if (find_uf(uf.name)) return;
  ufs.push_back(std::move(uf));
}

void SourceUnit::put_global(GlobalDecl g) {
  for (auto& existing : globals)
    if (existing.name == g.name) {
      existing = g;
      return;
    }
  globals.push_back(std::move(g));
}

namespace mk {

ExprPtr lit(std::int64_t v) { return make(IntLit{v}); }
ExprPtr var(std::string name) { return make(VarRef{std::move(name)}); }
ExprPtr unary(UnaryOp op, ExprPtr e) { return make(Unary{op, std::move(e)}); }
ExprPtr binary(BinaryOp op, ExprPtr a, ExprPtr b) { return make(Binary{op, std::move(a), std::move(b)}); }
ExprPtr call(std::string callee, std::vector<ExprPtr> args, int site) {
  return make(Call{std::move(callee), std::move(args), site});
}
ExprPtr nondet() { return make(Nondet{}); }
ExprPtr intrinsic(IntrinsicKind kind, int a, int b) { return make(Intrinsic{kind, a, b}); }

ExprPtr land(ExprPtr a, ExprPtr b) {
  if (is_true_literal(a)) return b;
  if (is_true_literal(b)) return a;
  if (is_false_literal(a) || is_false_literal(b)) return lit(0);
  return binary(BinaryOp::LogAnd, std::move(a), std::move(b));
}

ExprPtr lor(ExprPtr a, ExprPtr b) {
  if (is_false_literal(a)) return b;
  if (is_false_literal(b)) return a;
  if (is_true_literal(a) || is_true_literal(b)) return lit(1);
  return binary(BinaryOp::LogOr, std::move(a), std::move(b));
}

ExprPtr lnot(ExprPtr a) {
  if (is_true_literal(a)) return lit(0);
  if (is_false_literal(a)) return lit(1);
  return unary(UnaryOp::LogNot, std::move(a));
}

StmtPtr block(std::vector<StmtPtr> stmts) { return make_stmt(Block{std::move(stmts)}); }
StmtPtr decl(std::string name, ExprPtr init) { return make_stmt(Decl{std::move(name), std::move(init)}); }
StmtPtr assign(std::string target, ExprPtr value) { return make_stmt(Assign{std::move(target), std::move(value)}); }
StmtPtr multi_assign(std::vector<std::string> targets, ExprPtr call) {
  return make_stmt(MultiAssign{std::move(targets), std::move(call)});
}
StmtPtr if_(ExprPtr cond, StmtPtr then_branch, StmtPtr else_branch) {
  return make_stmt(If{std::move(cond), std::move(then_branch), std::move(else_branch)});
}
StmtPtr while_(ExprPtr cond, StmtPtr body) { return make_stmt(While{std::move(cond), std::move(body)}); }
StmtPtr ret(ExprPtr value) { return make_stmt(Return{{std::move(value)}}); }
StmtPtr ret_multi(std::vector<ExprPtr> values) { return make_stmt(Return{std::move(values)}); }
StmtPtr assume(ExprPtr cond, bool engine_owned) { return make_stmt(Assume{std::move(cond), engine_owned}); }
StmtPtr assert_(ExprPtr cond) { return make_stmt(Assert{std::move(cond)}); }
StmtPtr expr_stmt(ExprPtr e) { return make_stmt(ExprStmt{std::move(e)}); }
StmtPtr record(int store, std::vector<ExprPtr> values) { return make_stmt(Record{store, std::move(values)}); }

}  // namespace mk

bool is_true_literal(const ExprPtr& e) {
  auto* l = e ? std::get_if<IntLit>(&e->node) : nullptr;
  return l && l->value != 0;
}

bool is_false_literal(const ExprPtr& e) {
  auto* l = e ? std::get_if<IntLit>(&e->node) : nullptr;
  return l && l->value == 0;
}

namespace {

bool equal_list(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!equal(a[i], b[i])) return false;
  return true;
}

}  // namespace

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a == b) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const IntLit& x) { return x.value == std::get<IntLit>(b->node).value; },
          [&](const VarRef& x) { return x.name == std::get<VarRef>(b->node).name; },
          [&](const Unary& x) {
            auto& y = std::get<Unary>(b->node);
            return x.op == y.op && equal(x.operand, y.operand);
          },
          [&](const Binary& x) {
            auto& y = std::get<Binary>(b->node);
            return x.op == y.op && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
          },
          [&](const Call& x) {
            auto& y = std::get<Call>(b->node);
            return x.callee == y.callee && equal_list(x.args, y.args);
          },
          [&](const Nondet&) { return true; },
          [&](const Intrinsic& x) {
            auto& y = std::get<Intrinsic>(b->node);
            return x.kind == y.kind && x.a == y.a && x.b == y.b;
          },
      },
      a->node);
}

bool equal(const StmtPtr& a, const StmtPtr& b) {
  if (!a || !b) return !a && !b;
  if (a == b) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const Block& x) {
            auto& y = std::get<Block>(b->node);
            if (x.stmts.size() != y.stmts.size()) return false;
            for (std::size_t i = 0; i < x.stmts.size(); ++i)
              if (!equal(x.stmts[i], y.stmts[i])) return false;
            return true;
          },
          [&](const Decl& x) {
            auto& y = std::get<Decl>(b->node);
            return x.name == y.name && equal(x.init, y.init);
          },
          [&](const Assign& x) {
            auto& y = std::get<Assign>(b->node);
            return x.target == y.target && equal(x.value, y.value);
          },
          [&](const MultiAssign& x) {
            auto& y = std::get<MultiAssign>(b->node);
            return x.targets == y.targets && equal(x.call, y.call);
          },
          [&](const If& x) {
            auto& y = std::get<If>(b->node);
            return equal(x.cond, y.cond) && equal(x.then_branch, y.then_branch) &&
                   equal(x.else_branch, y.else_branch);
          },
          [&](const While& x) {
            auto& y = std::get<While>(b->node);
            return equal(x.cond, y.cond) && equal(x.body, y.body);
          },
          [&](const Return& x) { return equal_list(x.values, std::get<Return>(b->node).values); },
          [&](const Assume& x) {
            auto& y = std::get<Assume>(b->node);
            return x.engine_owned == y.engine_owned && equal(x.cond, y.cond);
          },
          [&](const Assert& x) { return equal(x.cond, std::get<Assert>(b->node).cond); },
          [&](const ExprStmt& x) { return equal(x.expr, std::get<ExprStmt>(b->node).expr); },
          [&](const Record& x) {
            auto& y = std::get<Record>(b->node);
            return x.store == y.store && equal_list(x.values, y.values);
          },
      },
      a->node);
}

bool equal(const FunctionDef& a, const FunctionDef& b) {
  return a.name == b.name && a.params == b.params && a.return_slots == b.return_slots && equal(a.body, b.body);
}

bool equal(const SourceUnit& a, const SourceUnit& b) {
  if (a.functions.size() != b.functions.size() || a.ufs.size() != b.ufs.size() ||
      a.globals.size() != b.globals.size())
    return false;
  for (std::size_t i = 0; i < a.functions.size(); ++i)
    if (!equal(a.functions[i], b.functions[i])) return false;
  for (std::size_t i = 0; i < a.ufs.size(); ++i)
    if (a.ufs[i].name != b.ufs[i].name || a.ufs[i].arity != b.ufs[i].arity) return false;
  for (std::size_t i = 0; i < a.globals.size(); ++i)
    if (a.globals[i].name != b.globals[i].name || a.globals[i].init != b.globals[i].init) return false;
  return true;
}

namespace {

void collect_vars(const ExprPtr& e, std::vector<std::string>& out) {
  if (!e) return;
  std::visit(overloaded{
                 [&](const VarRef& v) {
                   if (std::find(out.begin(), out.end(), v.name) == out.end()) out.push_back(v.name);
                 },
                 [&](const Unary& u) { collect_vars(u.operand, out); },
                 [&](const Binary& b) {
                   collect_vars(b.lhs, out);
                   collect_vars(b.rhs, out);
                 },
                 [&](const Call& c) {
                   for (auto& a : c.args) collect_vars(a, out);
                 },
                 [](const auto&) {},
             },
             e->node);
}

}  // namespace

// Generic bottom-up expression map. `leaf` handles VarRef/Call/Nondet nodes
// after children are mapped; returns nullptr to rebuild unchanged.
ExprPtr map_expr(const ExprPtr& e, const std::function<ExprPtr(const ExprPtr&, const ExprPtr&)>& fn) {
  if (!e) return e;
  ExprPtr rebuilt = std::visit(
      overloaded{
          [&](const Unary& u) -> ExprPtr {
            auto op = map_expr(u.operand, fn);
            return op == u.operand ? e : make(Unary{u.op, op}, e->pos);
          },
          [&](const Binary& b) -> ExprPtr {
            auto l = map_expr(b.lhs, fn);
            auto r = map_expr(b.rhs, fn);
            return (l == b.lhs && r == b.rhs) ? e : make(Binary{b.op, l, r}, e->pos);
          },
          [&](const Call& c) -> ExprPtr {
            std::vector<ExprPtr> args;
            bool changed = false;
            for (auto& a : c.args) {
              args.push_back(map_expr(a, fn));
              changed |= args.back() != a;
            }
            return changed ? make(Call{c.callee, std::move(args), c.site}, e->pos) : e;
          },
          [&](const auto&) -> ExprPtr { return e; },
      },
      e->node);
  ExprPtr replaced = fn(e, rebuilt);
  return replaced ? replaced : rebuilt;
}

StmtPtr map_stmt_exprs(const StmtPtr& s, const std::function<ExprPtr(const ExprPtr&)>& fe) {
  if (!s) return s;
  auto sub = [&](const StmtPtr& x) { return map_stmt_exprs(x, fe); };
  auto list = [&](const std::vector<ExprPtr>& v) {
    std::vector<ExprPtr> out;
    for (auto& x : v) out.push_back(fe(x));
    return out;
  };
  return std::visit(overloaded{
                        [&](const Block& b) -> StmtPtr {
                          std::vector<StmtPtr> out;
                          for (auto& x : b.stmts) out.push_back(sub(x));
                          return make_stmt(Block{std::move(out)}, s->pos);
                        },
                        [&](const Decl& d) -> StmtPtr {
                          return make_stmt(Decl{d.name, d.init ? fe(d.init) : nullptr}, s->pos);
                        },
                        [&](const Assign& a) -> StmtPtr { return make_stmt(Assign{a.target, fe(a.value)}, s->pos); },
                        [&](const MultiAssign& a) -> StmtPtr {
                          return make_stmt(MultiAssign{a.targets, fe(a.call)}, s->pos);
                        },
                        [&](const If& i) -> StmtPtr {
                          return make_stmt(If{fe(i.cond), sub(i.then_branch), sub(i.else_branch)}, s->pos);
                        },
                        [&](const While& w) -> StmtPtr { return make_stmt(While{fe(w.cond), sub(w.body)}, s->pos); },
                        [&](const Return& r) -> StmtPtr { return make_stmt(Return{list(r.values)}, s->pos); },
                        [&](const Assume& a) -> StmtPtr {
                          return make_stmt(Assume{fe(a.cond), a.engine_owned}, s->pos);
                        },
                        [&](const Assert& a) -> StmtPtr { return make_stmt(Assert{fe(a.cond)}, s->pos); },
                        [&](const ExprStmt& x) -> StmtPtr { return make_stmt(ExprStmt{fe(x.expr)}, s->pos); },
                        [&](const Record& r) -> StmtPtr { return make_stmt(Record{r.store, list(r.values)}, s->pos); },
                    },
                    s->node);
}

void visit_stmt_exprs(const StmtPtr& s, const std::function<void(const ExprPtr&)>& fe) {
  if (!s) return;
  std::visit(overloaded{
                 [&](const Block& b) {
                   for (auto& x : b.stmts) visit_stmt_exprs(x, fe);
                 },
                 [&](const Decl& d) {
                   if (d.init) fe(d.init);
                 },
                 [&](const Assign& a) { fe(a.value); },
                 [&](const MultiAssign& a) { fe(a.call); },
                 [&](const If& i) {
                   fe(i.cond);
                   visit_stmt_exprs(i.then_branch, fe);
                   visit_stmt_exprs(i.else_branch, fe);
                 },
                 [&](const While& w) {
                   fe(w.cond);
                   visit_stmt_exprs(w.body, fe);
                 },
                 [&](const Return& r) {
                   for (auto& x : r.values) fe(x);
                 },
                 [&](const Assume& a) { fe(a.cond); },
                 [&](const Assert& a) { fe(a.cond); },
                 [&](const ExprStmt& x) { fe(x.expr); },
                 [&](const Record& r) {
                   for (auto& x : r.values) fe(x);
                 },
             },
             s->node);
}


std::vector<std::string> free_variables(const ExprPtr& e) {
  std::vector<std::string> out;
  collect_vars(e, out);
  return out;
}

bool contains_call(const ExprPtr& e) {
  if (!e) return false;
  return std::visit(overloaded{
                        [](const Call&) { return true; },
                        [](const Nondet&) { return true; },
                        [](const Unary& u) { return contains_call(u.operand); },
                        [](const Binary& b) { return contains_call(b.lhs) || contains_call(b.rhs); },
                        [](const auto&) { return false; },
                    },
                    e->node);
}

ExprPtr clone(const ExprPtr& e) {
  return map_expr(e, [](const ExprPtr& original, const ExprPtr& rebuilt) -> ExprPtr {
    if (auto* c = std::get_if<Call>(&rebuilt->node)) {
      if (rebuilt == original) return make(Call{c->callee, c->args, c->site}, original->pos);
    }
    if (std::holds_alternative<Nondet>(rebuilt->node)) return make(Nondet{}, original->pos);
    return nullptr;
  });
}

StmtPtr clone(const StmtPtr& s) {
  return map_stmt_exprs(s, [](const ExprPtr& e) { return clone(e); });
}

ExprPtr rename_vars(const ExprPtr& e, const std::vector<std::string>& from, const std::vector<std::string>& to) {
  std::vector<ExprPtr> targets;
  for (auto& n : to) targets.push_back(mk::var(n));
  return substitute(e, from, targets);
}

ExprPtr substitute(const ExprPtr& e, const std::vector<std::string>& from, const std::vector<ExprPtr>& to) {
  return map_expr(e, [&](const ExprPtr&, const ExprPtr& rebuilt) -> ExprPtr {
    if (auto* v = std::get_if<VarRef>(&rebuilt->node)) {
      for (std::size_t i = 0; i < from.size(); ++i)
        if (from[i] == v->name) return to[i];
    }
    return nullptr;
  });
}

ExprPtr rewrite_calls(const ExprPtr& e, const CallRewriter& fn) {
  return map_expr(e, [&](const ExprPtr&, const ExprPtr& rebuilt) -> ExprPtr {
    if (auto* c = std::get_if<Call>(&rebuilt->node)) return fn(*c, rebuilt);
    return nullptr;
  });
}

StmtPtr rewrite_calls(const StmtPtr& s, const CallRewriter& fn) {
  return map_stmt_exprs(s, [&](const ExprPtr& e) { return rewrite_calls(e, fn); });
}

void visit_calls(const ExprPtr& e, const std::function<void(const Call&)>& fn) {
  if (!e) return;
  std::visit(overloaded{
                 [&](const Call& c) {
                   fn(c);
                   for (auto& a : c.args) visit_calls(a, fn);
                 },
                 [&](const Unary& u) { visit_calls(u.operand, fn); },
                 [&](const Binary& b) {
                   visit_calls(b.lhs, fn);
                   visit_calls(b.rhs, fn);
                 },
                 [](const auto&) {},
             },
             e->node);
}

void visit_calls(const StmtPtr& s, const std::function<void(const Call&)>& fn) {
  visit_stmt_exprs(s, [&](const ExprPtr& e) { visit_calls(e, fn); });
}

}  // namespace recveq::lang
