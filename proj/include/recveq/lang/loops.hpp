#pragma once

#include <vector>

#include "recveq/lang/ast.hpp"

namespace recveq::lang {

/// Replaces every while-loop of `f` by a call to a fresh tail-recursive
/// function `__rv_loopK`. Returns the rewritten `f` followed by the generated
/// functions. `counter` numbers the fresh functions across calls.
std::vector<FunctionDef> loops_to_recursion(const FunctionDef& f, int* counter = nullptr);

/// Applies loops_to_recursion to every function of the unit.
SourceUnit loops_to_recursion(const SourceUnit& unit);

bool has_loops(const FunctionDef& f);

}  // namespace recveq::lang
