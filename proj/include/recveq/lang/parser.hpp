#pragma once

#include <string>
#include <string_view>

#include "recveq/lang/ast.hpp"

namespace recveq::lang {

struct ParseOptions {
  /// Accept generated-only constructs: assume/assert/nondet, `__rv_` names,
  /// globals, multi-slot returns and leaf-store intrinsics.
  bool allow_internal = false;
};

/// Parses a whole source text. Throws FrontendError("SyntaxError" | "ReservedIdentifier").
SourceUnit parse(std::string_view text, const ParseOptions& options = {});

/// Parses a single expression (used for predicates given on the command line).
ExprPtr parse_expr(std::string_view text, const ParseOptions& options = {});

SourceUnit parse_file(const std::string& path, const ParseOptions& options = {});

}  // namespace recveq::lang
