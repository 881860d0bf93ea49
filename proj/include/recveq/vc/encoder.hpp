#pragma once

#include <memory>
#include <string>
#include <vector>

#include "recveq/common.hpp"
#include "recveq/lang/ast.hpp"
#include "recveq/oracle.hpp"
#include "recveq/vc/solver.hpp"
#include "recveq/vc/term.hpp"

namespace recveq::vc {

/// A loop- and recursion-free program: `entry` is executed on symbolic
/// arguments; calls go to inlined definitions or to UF symbols.
struct FlatProgram {
  lang::SourceUnit unit;
  std::string entry;
};

class NotFlat : public Error {
 public:
  using Error::Error;
};

struct UfApp {
  std::string symbol;
  std::vector<TermId> args;
  TermId result = kNoTerm;
  std::vector<oracle::ValueKey> keys;  // dynamic occurrences sharing this application
};

struct Encoding {
  std::shared_ptr<TermManager> tm;
  std::vector<TermId> inputs;       // entry parameters
  std::vector<TermId> constraints;  // assumptions, guarded
  std::vector<TermId> congruence;   // Ackermann constraints
  TermId violation = kNoTerm;       // some assertion fails
  TermId returned = kNoTerm;        // the entry returned normally
  std::vector<TermId> returns;      // entry return slots
  std::vector<UfApp> uf_apps;
  std::vector<std::pair<oracle::ValueKey, TermId>> nondets;

  /// constraints ∧ congruence ∧ violation
  std::vector<TermId> query() const;
};

/// Guarded single-pass encoding; raises NotFlat on loops or recursion.
Encoding encode_flat(const FlatProgram& p, unsigned width);

/// Term for a source-level operator applied to width-W values (booleans as 0/1).
TermId apply_binary(TermManager& tm, lang::BinaryOp op, TermId a, TermId b);
TermId apply_unary(TermManager& tm, lang::UnaryOp op, TermId a);

enum class Validity { Valid, Counterexample, Inconclusive };
const char* to_string(Validity v);

struct CheckOptions {
  unsigned width = 8;
  SolveOptions solver;
};

struct CheckResult {
  Validity verdict = Validity::Inconclusive;
  std::vector<std::int64_t> inputs;
  oracle::Choices choices;
  bool replay_ok = false;
  std::size_t free_bits = 0;
  Engine engine = Engine::SatCore;
  std::string note;
};

/// Decides whether every execution that satisfies the assumptions passes all
/// assertions. Counterexamples are replayed through the interpreter.
CheckResult check_valid(const FlatProgram& p, const CheckOptions& opt = {});

/// Interpreter choices realizing a model of an encoding.
oracle::Choices choices_from_model(const Encoding& enc, const std::vector<std::int64_t>& model);

/// Expands self-recursion `uw` times: level 0 keeps the name, level k is
/// `__rv_uw<k>_<f>`, and calls made at level uw go to the `__rv_block` stub.
lang::SourceUnit unwind(const lang::SourceUnit& unit, int uw);

/// SMT-LIB v2 text for a conjunction (QF_BV, or QF_UFBV when UF applications are given).
std::string emit_smtlib(const TermManager& tm, const std::vector<TermId>& conjuncts,
                        const std::vector<UfApp>& uf_apps = {});
std::string emit_smtlib(const Encoding& enc);

}  // namespace recveq::vc
