#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace recveq::vc::sat {

/// Literal: 2 * var + (negated ? 1 : 0).
using Lit = std::uint32_t;

inline Lit mk_lit(std::uint32_t var, bool negated = false) { return 2 * var + (negated ? 1u : 0u); }
inline Lit negate(Lit l) { return l ^ 1u; }
inline std::uint32_t var_of(Lit l) { return l >> 1; }
inline bool sign_of(Lit l) { return l & 1u; }

enum class Result { Sat, Unsat, Unknown };

struct Limits {
  std::int64_t conflicts = -1;  // negative: unlimited
  double seconds = -1;
};

struct SolverStats {
  std::uint64_t solves = 0, conflicts = 0, decisions = 0, propagations = 0, restarts = 0;
};

/// Conflict-driven clause-learning SAT solver: two watched literals, first-UIP
/// learning, VSIDS, phase saving, Luby restarts and learnt-clause reduction.
/// Clauses may be added between calls to solve().
class Solver {
 public:
  Solver();

  std::uint32_t new_var();
  std::uint32_t num_vars() const { return static_cast<std::uint32_t>(assigns_.size()); }
  std::size_t num_clauses() const { return original_.size(); }

  /// Returns false when the clause set became trivially unsatisfiable.
  bool add_clause(std::vector<Lit> lits);

  Result solve(const std::vector<Lit>& assumptions = {}, const Limits& limits = {});

  /// Value of a variable in the last satisfying assignment.
  bool model_value(std::uint32_t var) const { return model_[var] != 0; }
  bool lit_true(Lit l) const { return model_value(var_of(l)) != sign_of(l); }

  void set_phase(std::uint32_t var, bool value) { polarity_[var] = value; }
  const SolverStats& stats() const { return stats_; }

  /// Writes the original (non-learnt) clauses in DIMACS format.
  void write_dimacs(std::ostream& os) const;

 private:
  struct Clause {
    std::vector<Lit> lits;
    bool learnt = false;
    bool deleted = false;
    double activity = 0;
  };
  struct Watcher {
    std::uint32_t cref;
    Lit blocker;
  };
  static constexpr std::uint32_t kNoReason = 0xffffffffu;

  std::int8_t value(Lit l) const {
    std::int8_t v = assigns_[var_of(l)];
    return v < 0 ? -1 : static_cast<std::int8_t>(v ^ static_cast<std::int8_t>(sign_of(l)));
  }
  int level() const { return static_cast<int>(trail_lim_.size()); }
  void enqueue(Lit l, std::uint32_t reason);
  std::uint32_t propagate();
  void analyze(std::uint32_t confl, std::vector<Lit>& learnt, int& bt_level);
  bool redundant(Lit l, std::uint32_t abstract);
  void cancel_until(int lvl);
  void attach(std::uint32_t cref);
  std::uint32_t store(std::vector<Lit> lits, bool learnt);
  void bump_var(std::uint32_t v);
  void bump_clause(Clause& c);
  void reduce_db();
  Lit pick_branch();

  // binary max-heap on activity
  void heap_insert(std::uint32_t v);
  void heap_up(std::size_t i);
  void heap_down(std::size_t i);
  std::uint32_t heap_pop();
  bool heap_contains(std::uint32_t v) const { return v < heap_pos_.size() && heap_pos_[v] >= 0; }

  std::vector<Clause> clauses_;
  std::vector<std::uint32_t> original_, learnts_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<std::int8_t> assigns_;
  std::vector<char> polarity_;
  std::vector<char> model_;
  std::vector<std::uint32_t> reason_;
  std::vector<int> level_;
  std::vector<Lit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<double> activity_;
  std::vector<std::uint32_t> heap_;
  std::vector<std::int64_t> heap_pos_;
  std::vector<char> seen_;
  std::vector<std::uint32_t> minimized_;
  double var_inc_ = 1, clause_inc_ = 1;
  double max_learnts_ = 0;
  bool ok_ = true;
  SolverStats stats_;
};

}  // namespace recveq::vc::sat
