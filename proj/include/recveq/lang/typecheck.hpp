#pragma once

#include <map>
#include <string>
#include <vector>

#include "recveq/lang/ast.hpp"

namespace recveq::lang {

/// Throws FrontendError with kinds UndefinedCallee, UndefinedVariable,
/// ArityMismatch, MissingReturn, DuplicateName, MutualRecursionUnsupported.
void typecheck(const SourceUnit& unit);

struct CallSite {
  int site_index = 0;
  std::string callee;
  std::vector<ExprPtr> args;
};

/// Self-calls of `f` in textual order.
std::vector<CallSite> recursive_call_sites(const FunctionDef& f);

/// Copy of `f` whose self-calls carry their textual site index.
FunctionDef number_self_calls(const FunctionDef& f);

struct CallGraph {
  std::vector<std::string> nodes;
  std::map<std::string, std::vector<std::string>> edges;  // caller -> callees, first-call order, no duplicates
  std::vector<std::string> bottom_up;                     // callees before callers

  bool has_edge(const std::string& from, const std::string& to) const;
  bool is_recursive(const std::string& f) const { return has_edge(f, f); }
};

CallGraph call_graph(const SourceUnit& unit);

/// True when every control path of `s` ends in a return (or a blocking assume).
bool always_returns(const StmtPtr& s);

}  // namespace recveq::lang
