#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "recveq/lang/ast.hpp"
#include "recveq/oracle.hpp"
#include "recveq/transforms.hpp"
#include "recveq/vc/encoder.hpp"
#include "recveq/vc/solver.hpp"

namespace recveq::pathex {

/// A program together with its entry function; the entry's parameters are the
/// symbolic inputs.
using Task = vc::FlatProgram;

struct Options {
  unsigned width = 8;
  int depth_bound = 16;         // frames
  std::size_t path_bound = 4096;
  bool stop_at_depth_bound = true;  // symexec: give up at the first path that hits depth_bound
  vc::SolveOptions solver;
};

struct PathInfo {
  lang::ExprPtr pred;
  bool recursive = false;  // the path issues at least one recursive call
};

/// Feasible top-frame paths of `fn` with its self-calls stubbed to return 0.
/// The predicates partition the input domain. Throws PathBudgetExceeded.
std::vector<PathInfo> get_all_paths(const lang::SourceUnit& unit, const std::string& fn, const Options& opt = {});
std::vector<PathInfo> get_all_paths(const lang::FunctionDef& f, const Options& opt = {});

/// Inputs whose top frame performs no recursive call (self-calls replaced by assume(false)).
lang::ExprPtr natural_base_case_precondition(const lang::SourceUnit& unit, const std::string& fn,
                                             const Options& opt = {});
lang::ExprPtr natural_base_case_precondition(const lang::FunctionDef& f, const Options& opt = {});

/// Inputs on which the instrumented clone system sets the base-case flag.
lang::ExprPtr base_case_precondition(const transforms::Instrumented& clones, const Options& opt = {});

enum class SymVerdict { Proven, Refuted, Inconclusive };
const char* to_string(SymVerdict v);

struct SymResult {
  SymVerdict verdict = SymVerdict::Inconclusive;
  std::vector<std::int64_t> input;  // Refuted: the violating input
  bool replay_ok = false;
  std::string reason;               // Inconclusive: which bound was hit
  std::size_t paths = 0;
  int max_depth = 0;
};

/// Depth-first symbolic execution of the task with recursion kept. Proven when
/// every path closes within the bounds and no assertion can fail.
SymResult symexec_equiv(const Task& task, const Options& opt = {});

/// Disjunction / conjunction with constant folding of the literal predicates.
lang::ExprPtr disjunction(const std::vector<lang::ExprPtr>& xs);
lang::ExprPtr conjunction(const std::vector<lang::ExprPtr>& xs);
lang::ExprPtr negation(const lang::ExprPtr& e);

/// Single-parameter predicates (width <= 16) rewritten as a union of at most
/// `max_intervals` ranges found by sweeping the domain; anything else is returned as is.
lang::ExprPtr interval_form(const lang::ExprPtr& pred, const std::vector<std::string>& params, unsigned width,
                            std::size_t max_intervals = 4);

/// Source expression for a term over input variables; `names[i]` names variable i.
lang::ExprPtr to_expr(const vc::TermManager& tm, vc::TermId t, const std::vector<std::string>& names);

}  // namespace recveq::pathex
