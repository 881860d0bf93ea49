#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "recveq/common.hpp"
#include "recveq/lang/ast.hpp"
#include "recveq/transforms.hpp"
#include "recveq/vc/encoder.hpp"

namespace recveq::sync {

using lang::ExprPtr;
using lang::FunctionDef;
using lang::SourceUnit;
using transforms::SyncUnrolling;
using transforms::UnrollTree;

inline constexpr const char* kDepth = "__rv_D";
inline constexpr const char* kSite = "__rv_Site";

struct SyncProgram {
  SourceUnit unit;  // instrumented f1, f2 (same names, two extra parameters) and __rv_main
  std::string entry = "__rv_main";
  std::string f1, f2;
  std::size_t sites[2] = {0, 0};
  std::vector<std::size_t> projection;
};

/// Both functions must live in `ctx` under distinct names and take the same
/// number of parameters. A literal-false rho adds no blocking assumption.
/// `projection` lists the parameter positions recorded at leaves (empty: all).
SyncProgram build_sync_program(const SourceUnit& ctx, const std::string& f1, const std::string& f2,
                               const ExprPtr& rho1, const ExprPtr& rho2, bool strict_size_guard = false,
                               const std::vector<std::size_t>& projection = {});

/// One frame of an instrumented side, in execution (pre-)order.
struct WitnessFrame {
  int depth = 0;
  int site = -1;
  bool leaf = false;  // recorded and returned
  std::vector<std::int64_t> args;

  bool operator==(const WitnessFrame&) const = default;
};

struct SyncWitness {
  std::vector<std::int64_t> input;
  std::vector<WitnessFrame> frames[2];

  /// Recorded frames of one side.
  std::vector<WitnessFrame> records(int side) const;
};

class InconsistentWitness : public Error {
 public:
  using Error::Error;
};

/// Rebuilds the pruned call tree of each side from the frame lists.
/// Throws InconsistentWitness.
SyncUnrolling generate_sync_unrolling(const SyncWitness& w, std::size_t sites1, std::size_t sites2);
UnrollTree tree_from_frames(const std::vector<WitnessFrame>& frames, std::size_t sites);

struct Options {
  int max_uw = 6;
  bool strict_size_guard = false;
  double seconds = 60.0;
  vc::CheckOptions check;
  bool prune = true;
  std::vector<std::size_t> projection;  // leaf tuples compared on these positions; empty: all
  /// Upper bound on (records of side 1) x (records of side 2) at one unwinding.
  double max_record_pairs = 1 << 20;
};

enum class NotFoundReason { None, BudgetExhausted, ProvedImpossibleUpTo };
const char* to_string(NotFoundReason r);

struct SyncResult {
  bool found = false;
  SyncUnrolling su;
  SyncWitness witness;
  int uw = 0;                     // unwinding that produced the witness
  NotFoundReason reason = NotFoundReason::None;
  int proved_up_to = 0;           // largest uw shown to have no witness
  std::string note;
};

/// Searches uw = 1..max_uw for executions whose leaf sets coincide.
SyncResult find_sync_unrolling(const SourceUnit& ctx, const std::string& f1, const std::string& f2,
                               const ExprPtr& rho1, const ExprPtr& rho2, const Options& opt = {});

/// Argument tuples reaching the leaves of `tree` for `fn` at one input
/// (leaf calls record and return -1). Empty when the run does not finish.
std::optional<std::vector<std::vector<std::int64_t>>> leaf_tuples(const SourceUnit& ctx, const std::string& fn,
                                                                  const UnrollTree& tree,
                                                                  const std::vector<std::int64_t>& input,
                                                                  unsigned width = 8);

/// Turns expanded nodes with only leaf children back into leaves while the
/// leaf sets at the witness input stay equal.
SyncUnrolling prune(const SourceUnit& ctx, const std::string& f1, const std::string& f2, SyncUnrolling su,
                    const std::vector<std::int64_t>& input, unsigned width = 8,
                    const std::vector<std::size_t>& projection = {});

/// JSON: [{"side":1,"decisions":[{"depth","site","path","action"}]}, {"side":2,...}]
std::string to_json(const SyncUnrolling& su);
SyncUnrolling from_json(const std::string& text);
/// Indented tree listing.
std::string to_text(const SyncUnrolling& su, const std::string& f1, const std::string& f2);

}  // namespace recveq::sync
