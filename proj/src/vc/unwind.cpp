#include "recveq/vc/encoder.hpp"

#include "recveq/transforms.hpp"

namespace recveq::vc {

using namespace lang;

namespace {

bool self_recursive(const FunctionDef& f) {
  bool found = false;
  visit_calls(f.body, [&](const Call& c) { found = found || c.callee == f.name; });
  return found;
}

std::string level_name(const std::string& f, int k) {
  return k == 0 ? f : "__rv_uw" + std::to_string(k) + "_" + f;
}

}  // namespace

SourceUnit unwind(const SourceUnit& unit, int uw) {
  if (uw < 1) throw Error("unwind: bound must be at least 1");
  SourceUnit out;
  out.ufs = unit.ufs;
  out.globals = unit.globals;
  for (auto& f : unit.functions) {
    if (!self_recursive(f)) {
      out.functions.push_back(f);
      continue;
    }
    std::string stub = "__rv_block";
    if (auto* existing = out.find(stub); existing && existing->params.size() != f.params.size())
      stub += "_a" + std::to_string(f.params.size());
    transforms::add_stub(out, transforms::SubstitutionMode{transforms::SubstKind::AssumeFalse, stub},
                         f.params.size());
    for (int k = 0; k <= uw; ++k) {
      FunctionDef g = f;
      g.name = level_name(f.name, k);
      const std::string target = k == uw ? stub : level_name(f.name, k + 1);
      g.body = rewrite_calls(clone(f.body), [&](const Call& c, const ExprPtr& rebuilt) -> ExprPtr {
        if (c.callee != f.name) return nullptr;
        return std::make_shared<Expr>(Expr{Call{target, c.args, c.site}, rebuilt->pos});
      });
      out.functions.push_back(std::move(g));
    }
  }
  return out;
}

}  // namespace recveq::vc
