#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "recveq/lang/ast.hpp"
#include "recveq/sync.hpp"
#include "recveq/transforms.hpp"
#include "recveq/vc/solver.hpp"

namespace recveq::prover {

using lang::ExprPtr;
using lang::FunctionDef;
using lang::SourceUnit;
using transforms::SyncUnrolling;

enum class Verdict { Equivalent, NotEquivalent, NotProven, Inconclusive };
const char* to_string(Verdict v);

enum class Reason {
  None,
  PremiseFailed,
  BaseFailed,
  StepFailed,
  SyncUnrollingNotFound,
  CalleeUnproven,
  Unsupported,
  BaseInconclusive,
  SolverBudget,
};
const char* to_string(Reason r);

struct Options {
  unsigned width = 8;
  int max_uw = 6;
  bool strict_size_guard = false;
  int depth_bound = 16;
  std::size_t path_bound = 4096;
  double sync_seconds = 60.0;
  vc::SolveOptions solver;
  bool escalate = true;          // basic PART-EQ, then FULL-PART-EQ
  bool relaxed_sync = true;      // retry the sync search on the parameters the base cases read
  bool refute = true;            // oracle sweep when no proof was found
  std::size_t refute_fuel = 256;
  std::optional<SyncUnrolling> manual_su;
  std::string dump_dir;          // assembled tasks are written here when set
  bool emit_smt = false;         // with dump_dir: SMT-LIB next to each flat task
};

/// Both sides in one unit under distinct names, plus the programs the
/// verdicts are about (used for witness replay and the oracle sweep).
struct PairContext {
  SourceUnit unit;
  std::string f1, f2;
  SourceUnit real1, real2;
  std::string real_f1, real_f2;
};

/// Merges two units; side-2 names that clash with side 1 are renamed.
PairContext make_pair_context(const SourceUnit& u1, const std::string& f1, const SourceUnit& u2,
                              const std::string& f2);
/// Both functions from one unit.
PairContext make_pair_context(const SourceUnit& u, const std::string& f1, const std::string& f2);

struct Step {
  std::string task;
  std::string result;
  std::string detail;
  double seconds = 0;
};

struct PathPairResult {
  std::size_t index = 0;
  std::string pp1, pp2;
  bool feasible = true;
  bool mixed = false;  // one side base-only
  std::string sync = "skipped";
  std::string base = "skipped";
  std::string step = "skipped";
  std::string bcpc1, bcpc2;
  std::optional<SyncUnrolling> su;
  bool relaxed = false;
};

struct ProofOutcome {
  Verdict verdict = Verdict::NotProven;
  Reason reason = Reason::None;
  std::string detail;
  std::string strategy = "none";
  std::optional<std::vector<std::int64_t>> witness;
  std::int64_t v1 = 0, v2 = 0;  // NotEquivalent: the two results
  std::vector<Step> trail;
  std::vector<PathPairResult> path_pairs;
  std::size_t pruned_pairs = 0;
  std::optional<SyncUnrolling> su;  // single-path pipeline
  double seconds = 0;
};

/// The flat PART-EQ program: self-calls of both sides become one shared UF.
SourceUnit part_eq_task(const PairContext& p);

/// Self-calls of both sides become one shared UF.
ProofOutcome prove_part_eq_basic(const PairContext& p, const Options& opt = {});

struct BaseCaseInfo {
  ExprPtr bcpc1, bcpc2;  // over the entry parameters i0, i1, ...
  ExprPtr ebcp;
};

struct SubResult {
  enum class Kind { Valid, Failed, Inconclusive } kind = Kind::Inconclusive;
  std::string detail;
  std::optional<std::vector<std::int64_t>> input;
  bool replay_ok = false;
};
const char* to_string(SubResult::Kind k);

/// Symbolic base-case proof of the unrolled pair under bcpc1 || bcpc2 (and `restrict`).
SubResult prove_path_base_equiv(const PairContext& p, const SyncUnrolling& su, const ExprPtr& restrict,
                                BaseCaseInfo& info, const Options& opt = {});
/// Step proof with UF leaves under !ebcp (and `restrict`).
SubResult prove_path_step_equiv(const PairContext& p, const SyncUnrolling& su, const ExprPtr& ebcp,
                                const ExprPtr& restrict, const Options& opt = {});

/// bcpc of `fn` unrolled by `tree`, over the parameters of `fn`.
ExprPtr base_case_of(const SourceUnit& u, const std::string& fn, const transforms::UnrollTree& tree,
                     const Options& opt = {});

/// Predicates are given over the entry parameters i0, i1, ...
bool check_pair_feasible(const ExprPtr& pp1, const ExprPtr& pp2, std::size_t arity, const Options& opt = {});

ProofOutcome prove_full_part_eq(const PairContext& p, const Options& opt = {});

/// Basic, then full, then the refutation sweep.
ProofOutcome prove_pair(const PairContext& p, const Options& opt = {});

struct PairReport {
  std::string name1, name2;
  ProofOutcome outcome;
};

struct EquivalenceReport {
  std::vector<PairReport> pairs;
};

/// Bottom-up over the call graph of side 1; proven pairs become shared UFs in
/// their callers. Throws FrontendError("MutualRecursionUnsupported").
EquivalenceReport prove_programs(const SourceUnit& u1, const SourceUnit& u2,
                                 const std::vector<std::pair<std::string, std::string>>& mapping,
                                 const Options& opt = {});

/// Entry parameter names used by every assembled task.
std::vector<std::string> entry_params(std::size_t arity);

std::string to_json(const EquivalenceReport& r);
std::string to_json(const ProofOutcome& o, const std::string& n1, const std::string& n2);
std::string summary_table(const EquivalenceReport& r);

/// Exit status for a set of verdicts: 0 all Equivalent, 2 any NotEquivalent, 1 otherwise.
int exit_code(const EquivalenceReport& r);

}  // namespace recveq::prover
