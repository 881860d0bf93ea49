#pragma once

#include <string>

#include "recveq/lang/parser.hpp"
#include "recveq/lang/typecheck.hpp"

namespace testutil {

inline std::string corpus(const std::string& file) { return std::string(RECVEQ_CORPUS_DIR) + "/" + file; }

inline recveq::lang::SourceUnit load(const std::string& file) {
  auto u = recveq::lang::parse_file(corpus(file));
  recveq::lang::typecheck(u);
  return u;
}

struct CorpusFn {
  const char* file;
  const char* fn;
};

inline const CorpusFn kRecursive[] = {
    {"sum.mrc", "sum1"}, {"sum.mrc", "sum2"},         {"fib.mrc", "f1"},       {"fib.mrc", "f2"},
    {"fib.mrc", "h1"},   {"fib.mrc", "h2"},           {"mode.mrc", "m1"},      {"mode.mrc", "m2"},
    {"redundant.mrc", "t1"}, {"redundant.mrc", "t2"}, {"pascal.mrc", "p1"},    {"pascal.mrc", "p2"},
};

}  // namespace testutil
