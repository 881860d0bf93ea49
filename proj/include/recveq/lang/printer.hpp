#pragma once

#include <string>

#include "recveq/lang/ast.hpp"

namespace recveq::lang {

std::string print(const ExprPtr& e);
std::string print(const StmtPtr& s, int indent = 0);
std::string print(const FunctionDef& f);
/// Canonical form: globals, then UF prototypes, then functions.
std::string print(const SourceUnit& u);

}  // namespace recveq::lang
