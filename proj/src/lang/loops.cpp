#include "recveq/lang/loops.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace recveq::lang {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void collect_names(const StmtPtr& s, std::set<std::string>& used, std::set<std::string>& assigned,
                   std::set<std::string>& declared, bool& has_return) {
  if (!s) return;
  visit_stmt_exprs(s, [&](const ExprPtr& e) {
    for (auto& v : free_variables(e)) used.insert(v);
  });
  std::function<void(const StmtPtr&)> walk = [&](const StmtPtr& st) {
    if (!st) return;
    std::visit(overloaded{
                   [&](const Block& x) {
                     for (auto& c : x.stmts) walk(c);
                   },
                   [&](const Decl& x) { declared.insert(x.name); },
                   [&](const Assign& x) {
                     assigned.insert(x.target);
                     used.insert(x.target);
                   },
                   [&](const MultiAssign& x) {
                     for (auto& t : x.targets) {
                       assigned.insert(t);
                       used.insert(t);
                     }
                   },
                   [&](const If& x) {
                     walk(x.then_branch);
                     walk(x.else_branch);
                   },
                   [&](const While& x) { walk(x.body); },
                   [&](const Return&) { has_return = true; },
                   [](const auto&) {},
               },
               st->node);
  };
  walk(s);
}

StmtPtr rewrite_returns(const StmtPtr& s, const std::vector<ExprPtr>& suffix) {
  if (!s) return s;
  return std::visit(overloaded{
                        [&](const Block& x) -> StmtPtr {
                          std::vector<StmtPtr> out;
                          for (auto& c : x.stmts) out.push_back(rewrite_returns(c, suffix));
                          return mk::block(std::move(out));
                        },
                        [&](const If& x) -> StmtPtr {
                          return mk::if_(x.cond, rewrite_returns(x.then_branch, suffix),
                                         rewrite_returns(x.else_branch, suffix));
                        },
                        [&](const While& x) -> StmtPtr { return mk::while_(x.cond, rewrite_returns(x.body, suffix)); },
                        [&](const Return& x) -> StmtPtr {
                          std::vector<ExprPtr> vals{mk::lit(1)};
                          vals.insert(vals.end(), x.values.begin(), x.values.end());
                          vals.insert(vals.end(), suffix.begin(), suffix.end());
                          return mk::ret_multi(std::move(vals));
                        },
                        [&](const auto&) -> StmtPtr { return s; },
                    },
                    s->node);
}

std::vector<ExprPtr> vars(const std::vector<std::string>& names) {
  std::vector<ExprPtr> out;
  for (auto& n : names) out.push_back(mk::var(n));
  return out;
}

// `targets = call;` for any number of slots.
StmtPtr bind_slots(const std::vector<std::string>& targets, ExprPtr call) {
  if (targets.empty()) return mk::expr_stmt(std::move(call));
  if (targets.size() == 1) return mk::assign(targets[0], std::move(call));
  return mk::multi_assign(targets, std::move(call));
}

StmtPtr give(const std::vector<ExprPtr>& values) {
  if (values.empty()) return mk::ret(mk::lit(0));
  if (values.size() == 1) return mk::ret(values[0]);
  return mk::ret_multi(values);
}

class Lowering {
 public:
  Lowering(int& counter, std::vector<FunctionDef>& out) : counter_(counter), out_(out) {}

  FunctionDef run(const FunctionDef& f) {
    slots_ = f.return_slots;
    scopes_.assign(1, f.params);
    FunctionDef g = f;
    g.body = stmt(f.body, false);
    return g;
  }

 private:
  StmtPtr stmt(const StmtPtr& s, bool push) {
    if (!s) return s;
    return std::visit(overloaded{
                          [&](const Block& x) -> StmtPtr {
                            if (push) scopes_.emplace_back();
                            std::vector<StmtPtr> out;
                            for (auto& c : x.stmts) out.push_back(stmt(c, true));
                            if (push) scopes_.pop_back();
                            auto b = mk::block(std::move(out));
                            return b;
                          },
                          [&](const Decl& x) -> StmtPtr {
                            scopes_.back().push_back(x.name);
                            return s;
                          },
                          [&](const If& x) -> StmtPtr {
                            return mk::if_(x.cond, scoped(x.then_branch), scoped(x.else_branch));
                          },
                          [&](const While& x) -> StmtPtr { return lower(x); },
                          [&](const auto&) -> StmtPtr { return s; },
                      },
                      s->node);
  }

  StmtPtr scoped(const StmtPtr& s) {
    if (!s) return s;
    scopes_.emplace_back();
    auto r = stmt(s, false);
    scopes_.pop_back();
    return r;
  }

  StmtPtr lower(const While& loop) {
    std::set<std::string> used, assigned, declared;
    bool has_return = false;
    for (auto& v : free_variables(loop.cond)) used.insert(v);
    collect_names(loop.body, used, assigned, declared, has_return);

    std::vector<std::string> params, modified;
    for (auto& scope : scopes_)
      for (auto& n : scope)
        if (used.count(n) && std::find(params.begin(), params.end(), n) == params.end()) params.push_back(n);
    for (auto& n : params)
      if (assigned.count(n) && !declared.count(n)) modified.push_back(n);

    int id = counter_++;
    std::string name = "__rv_loop" + std::to_string(id);

    // Slot layout: [flag, ret_1..ret_R] when the body returns, then the modified variables.
    std::vector<std::string> inner_slots, outer_slots;
    std::vector<StmtPtr> inner_decls, outer_decls;
    if (has_return) {
      inner_slots.push_back("__rv_flag");
      outer_slots.push_back("__rv_flag" + std::to_string(id));
      for (int i = 0; i < slots_; ++i) {
        inner_slots.push_back("__rv_ret" + std::to_string(i));
        outer_slots.push_back("__rv_ret" + std::to_string(id) + "_" + std::to_string(i));
      }
      for (auto& n : inner_slots) inner_decls.push_back(mk::decl(n, nullptr));
      for (auto& n : outer_slots) outer_decls.push_back(mk::decl(n, nullptr));
    }
    inner_slots.insert(inner_slots.end(), modified.begin(), modified.end());
    outer_slots.insert(outer_slots.end(), modified.begin(), modified.end());

    std::vector<ExprPtr> exit_values;
    if (has_return)
      for (int i = 0; i <= slots_; ++i) exit_values.push_back(mk::lit(0));
    for (auto& e : vars(modified)) exit_values.push_back(e);

    StmtPtr body = has_return ? rewrite_returns(loop.body, vars(modified)) : loop.body;
    std::vector<StmtPtr> step{body, bind_slots(inner_slots, mk::call(name, vars(params))), give(vars(inner_slots))};
    std::vector<StmtPtr> fn_body = inner_decls;
    fn_body.push_back(mk::if_(loop.cond, mk::block(std::move(step))));
    fn_body.push_back(give(exit_values));

    FunctionDef fn;
    fn.name = name;
    fn.params = params;
    fn.body = mk::block(std::move(fn_body));
    fn.return_slots = std::max<int>(1, static_cast<int>(inner_slots.size()));
    out_.push_back(std::move(fn));

    std::vector<StmtPtr> site = outer_decls;
    site.push_back(bind_slots(outer_slots, mk::call(name, vars(params))));
    if (has_return) {
      std::vector<ExprPtr> rets;
      for (int i = 0; i < slots_; ++i) rets.push_back(mk::var(outer_slots[1 + i]));
      site.push_back(mk::if_(mk::var(outer_slots[0]), give(rets)));
    }
    return mk::block(std::move(site));
  }

  int& counter_;
  std::vector<FunctionDef>& out_;
  int slots_ = 1;
  std::vector<std::vector<std::string>> scopes_;
};

bool stmt_has_loop(const StmtPtr& s) {
  if (!s) return false;
  return std::visit(overloaded{
                        [](const Block& x) { return std::any_of(x.stmts.begin(), x.stmts.end(), stmt_has_loop); },
                        [](const If& x) { return stmt_has_loop(x.then_branch) || stmt_has_loop(x.else_branch); },
                        [](const While&) { return true; },
                        [](const auto&) { return false; },
                    },
                    s->node);
}

}  // namespace

bool has_loops(const FunctionDef& f) { return stmt_has_loop(f.body); }

std::vector<FunctionDef> loops_to_recursion(const FunctionDef& f, int* counter) {
  int local = 0;
  int& next = counter ? *counter : local;
  std::vector<FunctionDef> result;
  if (!has_loops(f)) {
    result.push_back(f);
    return result;
  }
  std::vector<FunctionDef> pending{f};
  while (!pending.empty()) {
    FunctionDef cur = pending.front();
    pending.erase(pending.begin());
    std::vector<FunctionDef> fresh;
    Lowering lw(next, fresh);
    result.push_back(lw.run(cur));
    for (auto& g : fresh) {
      if (has_loops(g))
        pending.push_back(g);
      else
        result.push_back(g);
    }
  }
  return result;
}

SourceUnit loops_to_recursion(const SourceUnit& unit) {
  SourceUnit out;
  out.ufs = unit.ufs;
  out.globals = unit.globals;
  int counter = 0;
  for (auto& f : unit.functions)
    if (is_reserved(f.name) && f.name.rfind("__rv_loop", 0) == 0) ++counter;
  for (auto& f : unit.functions)
    for (auto& g : loops_to_recursion(f, &counter)) out.functions.push_back(std::move(g));
  return out;
}

}  // namespace recveq::lang
