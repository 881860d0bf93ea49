#include "recveq/transforms.hpp"

#include <algorithm>
#include <functional>

#include "recveq/common.hpp"
#include "recveq/lang/typecheck.hpp"

namespace recveq::transforms {

using namespace lang;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

StmtPtr drop_engine_assumes(const StmtPtr& s) {
  if (!s) return s;
  return std::visit(overloaded{
                        [&](const Block& x) -> StmtPtr {
                          std::vector<StmtPtr> out;
                          for (auto& c : x.stmts) {
                            if (auto* a = std::get_if<Assume>(&c->node); a && a->engine_owned) continue;
                            out.push_back(drop_engine_assumes(c));
                          }
                          return mk::block(std::move(out));
                        },
                        [&](const If& x) -> StmtPtr {
                          return mk::if_(x.cond, drop_engine_assumes(x.then_branch),
                                         drop_engine_assumes(x.else_branch));
                        },
                        [&](const auto&) -> StmtPtr { return s; },
                    },
                    s->node);
}

std::size_t count_assumes(const StmtPtr& s) {
  if (!s) return 0;
  return std::visit(overloaded{
                        [](const Block& x) {
                          std::size_t n = 0;
                          for (auto& c : x.stmts) n += count_assumes(c);
                          return n;
                        },
                        [](const If& x) { return count_assumes(x.then_branch) + count_assumes(x.else_branch); },
                        [](const Assume& x) -> std::size_t { return x.engine_owned ? 1 : 0; },
                        [](const auto&) -> std::size_t { return 0; },
                    },
                    s->node);
}

std::vector<std::string> stub_params(std::size_t arity) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < arity; ++i) out.push_back("a" + std::to_string(i));
  return out;
}

}  // namespace

bool UnrollTree::is_identity() const {
  if (!expand) return true;
  return std::all_of(children.begin(), children.end(), [](const UnrollTree& c) { return !c.expand; });
}

int UnrollTree::height() const {
  int h = 0;
  for (auto& c : children) h = std::max(h, 1 + c.height());
  return h;
}

std::size_t UnrollTree::expanded_count() const {
  if (!expand) return 0;
  std::size_t n = 1;
  for (auto& c : children) n += c.expanded_count();
  return n;
}

std::vector<FunctionDef> apply_unrolling(const FunctionDef& f, const UnrollTree& tree) {
  const FunctionDef numbered = number_self_calls(f);
  const std::size_t sites = recursive_call_sites(f).size();
  if (tree.is_identity()) {
    if (tree.expand && tree.children.size() != sites)
      throw TransformError("ArityMismatch", "tree node has " + std::to_string(tree.children.size()) +
                                                " children but '" + f.name + "' has " + std::to_string(sites) +
                                                " recursive call sites");
    return {f};
  }
  std::vector<FunctionDef> out;
  std::string suffix;
  std::function<std::string(const UnrollTree&)> emit = [&](const UnrollTree& node) -> std::string {
    if (node.children.size() != sites)
      throw TransformError("ArityMismatch", "tree node has " + std::to_string(node.children.size()) +
                                                " children but '" + f.name + "' has " + std::to_string(sites) +
                                                " recursive call sites");
    std::string name = f.name + suffix;
    suffix += "_";
    std::size_t slot = out.size();
    out.emplace_back();
    std::vector<std::string> targets(sites, f.name);
    for (std::size_t k = 0; k < sites; ++k)
      if (node.children[k].expand) targets[k] = emit(node.children[k]);
    FunctionDef clone_fn = numbered;
    clone_fn.name = name;
    clone_fn.body = rewrite_calls(lang::clone(numbered.body), [&](const Call& c, const ExprPtr& rebuilt) -> ExprPtr {
      if (c.callee != f.name || c.site < 0) return nullptr;
      return std::make_shared<Expr>(Expr{Call{targets[static_cast<std::size_t>(c.site)], c.args, c.site}, rebuilt->pos});
    });
    out[slot] = std::move(clone_fn);
    return name;
  };
  emit(tree);
  return out;
}

FunctionDef substitute_calls(const FunctionDef& f, const std::set<std::string>& targets, const SubstitutionMode& mode) {
  FunctionDef out = f;
  out.body = rewrite_calls(f.body, [&](const Call& c, const ExprPtr& rebuilt) -> ExprPtr {
    if (!targets.count(c.callee)) return nullptr;
    return std::make_shared<Expr>(Expr{Call{mode.symbol, c.args, c.site}, rebuilt->pos});
  });
  return out;
}

void add_stub(SourceUnit& unit, const SubstitutionMode& mode, std::size_t arity) {
  if (unit.has_name(mode.symbol)) return;
  switch (mode.kind) {
    case SubstKind::UF: unit.put_uf({mode.symbol, arity}); break;
    case SubstKind::RetZero: {
      FunctionDef g{mode.symbol, stub_params(arity), mk::block({mk::ret(mk::lit(0))}), 1, {}};
      unit.put(std::move(g));
      break;
    }
    case SubstKind::AssumeFalse: {
      FunctionDef g{mode.symbol, stub_params(arity), mk::block({mk::assume(mk::lit(0))}), 1, {}};
      unit.put(std::move(g));
      break;
    }
  }
}

FunctionDef add_assumption(const FunctionDef& f, const ExprPtr& p, bool replace) {
  for (auto& v : free_variables(p))
    if (std::find(f.params.begin(), f.params.end(), v) == f.params.end())
      throw TransformError("FreeVariable", "predicate mentions '" + v + "', not a parameter of '" + f.name + "'");
  FunctionDef out = f;
  StmtPtr body = replace ? drop_engine_assumes(f.body) : f.body;
  std::vector<StmtPtr> stmts{mk::assume(p, true)};
  auto& b = std::get<Block>(body->node);
  stmts.insert(stmts.end(), b.stmts.begin(), b.stmts.end());
  out.body = mk::block(std::move(stmts));
  return out;
}

std::size_t count_engine_assumptions(const FunctionDef& f) { return count_assumes(f.body); }

Instrumented instrument_bc_flag(const std::vector<FunctionDef>& clones, const std::string& original,
                                const ExprPtr& rho) {
  if (clones.empty()) throw Error("instrument_bc_flag: no clones");
  Instrumented out;
  const auto ret = SubstitutionMode::ret_zero();
  out.unit.put_global({kBcFlag, 0});
  add_stub(out.unit, ret, clones.front().params.size());
  for (auto& c : clones) {
    FunctionDef g = substitute_calls(c, {original}, ret);
    auto& b = std::get<Block>(g.body->node);
    std::vector<StmtPtr> stmts{mk::if_(rho, mk::assign(kBcFlag, mk::lit(1)))};
    stmts.insert(stmts.end(), b.stmts.begin(), b.stmts.end());
    g.body = mk::block(std::move(stmts));
    out.unit.put(std::move(g));
  }
  const FunctionDef& entry = clones.front();
  std::vector<ExprPtr> args;
  for (auto& p : entry.params) args.push_back(mk::var(p));
  FunctionDef wrapper{kBcMain,
                      entry.params,
                      mk::block({mk::decl("__rv_r", mk::call(original, args)), mk::assume(mk::var(kBcFlag)),
                                 mk::ret(mk::var("__rv_r"))}),
                      1,
                      {}};
  out.unit.put(std::move(wrapper));
  out.entry = kBcMain;
  out.params = entry.params;
  return out;
}

}  // namespace recveq::transforms
