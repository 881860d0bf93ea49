#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "recveq/vc/sat.hpp"
#include "recveq/vc/term.hpp"

namespace recveq::vc {

enum class Engine { Auto, Enumerate, SatCore };

const char* to_string(Engine e);
Engine engine_from_string(const std::string& s);

struct SolveOptions {
  Engine engine = Engine::Auto;
  unsigned enumerate_max_bits = 24;
  sat::Limits limits{2000000, 10.0};
  bool lexmin = true;  // SatCore: return the lexicographically least model
  std::size_t lexmin_bits = 64;  // minimized prefix of the variables, in declaration order
};

enum class SatStatus { Sat, Unsat, Unknown };

const char* to_string(SatStatus s);

struct SolveResult {
  SatStatus status = SatStatus::Unknown;
  std::vector<std::int64_t> model;  // per variable index, sign-extended
  Engine engine = Engine::SatCore;
  std::size_t free_bits = 0;
};

/// Raised by the Enumerate engine when the query has more free bits than allowed.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Number of free variable bits of a conjunction.
std::size_t free_bits(const TermManager& tm, const std::vector<TermId>& conjuncts);

/// Decides the conjunction. Both engines order models the same way: variables by
/// index, each compared as an unsigned value, so Sat models are lexicographically least.
SolveResult solve(const TermManager& tm, const std::vector<TermId>& conjuncts, const SolveOptions& opt = {});

SolveResult solve_enumerate(const TermManager& tm, const std::vector<TermId>& conjuncts, unsigned max_bits = 24);
SolveResult solve_satcore(const TermManager& tm, const std::vector<TermId>& conjuncts, const SolveOptions& opt = {});

/// Process-wide counters and cross-checking switches.
struct BackendStats {
  std::uint64_t queries = 0;
  std::uint64_t sat = 0, unsat = 0, unknown = 0;
  std::uint64_t differential_checks = 0, differential_mismatches = 0;
  std::uint64_t replays = 0, replay_failures = 0;
  std::uint64_t enumerate_used = 0, satcore_used = 0;
};

BackendStats& backend_stats();
void reset_backend_stats();

/// When enabled, every query with at most `enumerate_max_bits` free bits is run on
/// both engines and disagreements are counted.
void set_differential(bool on);
bool differential_enabled();

/// Optional DIMACS dump directory for SatCore queries (empty: off).
void set_cnf_dump_dir(const std::string& dir);

}  // namespace recveq::vc
