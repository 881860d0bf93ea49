#pragma once

#include <set>
#include <string>
#include <vector>

#include "recveq/lang/ast.hpp"

namespace recveq::transforms {

using lang::ExprPtr;
using lang::FunctionDef;
using lang::SourceUnit;

/// One side of a sync-unrolling: a pruned call tree. An expanded node has one
/// child per recursive call site, in site order.
struct UnrollTree {
  bool expand = false;
  std::vector<UnrollTree> children;

  static UnrollTree leaf() { return {}; }
  static UnrollTree node(std::vector<UnrollTree> kids) { return {true, std::move(kids)}; }

  /// True for a leaf or an expanded root whose children are all leaves.
  bool is_identity() const;
  int height() const;
  std::size_t expanded_count() const;
  bool operator==(const UnrollTree& o) const { return expand == o.expand && children == o.children; }
};

struct SyncUnrolling {
  UnrollTree side[2];
};

/// Materializes the tree as clones f, f_, f__, ... (pre-order). Leaf sites call
/// the original name. Throws TransformError("ArityMismatch").
std::vector<FunctionDef> apply_unrolling(const FunctionDef& f, const UnrollTree& tree);

enum class SubstKind { UF, RetZero, AssumeFalse };

struct SubstitutionMode {
  SubstKind kind = SubstKind::UF;
  std::string symbol = "UF";

  static SubstitutionMode uf(std::string sym) { return {SubstKind::UF, std::move(sym)}; }
  static SubstitutionMode ret_zero() { return {SubstKind::RetZero, "__rv_ret"}; }
  static SubstitutionMode assume_false() { return {SubstKind::AssumeFalse, "__rv_block"}; }
};

/// Redirects every call to a name in `targets` to the mode's symbol.
FunctionDef substitute_calls(const FunctionDef& f, const std::set<std::string>& targets, const SubstitutionMode& mode);

/// Adds the definitions the mode's symbol needs (a UF prototype or a stub body) to `unit`.
void add_stub(SourceUnit& unit, const SubstitutionMode& mode, std::size_t arity);

/// Inserts `__rv_assume(p)` at the top of the body (active in every frame).
/// With `replace`, earlier engine-owned assumptions are dropped first.
/// Throws TransformError("FreeVariable").
FunctionDef add_assumption(const FunctionDef& f, const ExprPtr& p, bool replace);

/// Number of engine-owned assumptions in the body.
std::size_t count_engine_assumptions(const FunctionDef& f);

inline constexpr const char* kBcFlag = "__rv_bc_flag";
inline constexpr const char* kBcMain = "__rv_main";

struct Instrumented {
  SourceUnit unit;        // clones + ret stub + flag global + wrapper
  std::string entry;      // the wrapper: runs the clones, then assume(flag)
  std::vector<std::string> params;
};

/// Sets a shared flag in every clone frame where `rho` holds; leaf calls to
/// `original` become ret stubs.
Instrumented instrument_bc_flag(const std::vector<FunctionDef>& clones, const std::string& original,
                                const ExprPtr& rho);

}  // namespace recveq::transforms
