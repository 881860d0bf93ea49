#pragma once

#include <map>
#include <unordered_map>
#include <vector>

#include "recveq/vc/sat.hpp"
#include "recveq/vc/term.hpp"

namespace recveq::vc {

/// Tseitin translation of terms into clauses of a SAT solver. Gates are
/// hash-consed, so blasting the same term twice yields the same literal.
class BitBlaster {
 public:
  BitBlaster(const TermManager& tm, sat::Solver& solver);

  sat::Lit blast_bool(TermId t);
  const std::vector<sat::Lit>& blast_bv(TermId t);  // LSB first

  /// SAT variables backing a term-level variable (one per bit, LSB first).
  const std::vector<sat::Lit>& var_bits(std::size_t var_index);
  sat::Lit lit_true() const { return true_; }

 private:
  void blast(TermId t);
  sat::Lit fresh();
  sat::Lit mk_and(sat::Lit a, sat::Lit b);
  sat::Lit mk_or(sat::Lit a, sat::Lit b) { return sat::negate(mk_and(sat::negate(a), sat::negate(b))); }
  sat::Lit mk_xor(sat::Lit a, sat::Lit b);
  sat::Lit mk_mux(sat::Lit c, sat::Lit t, sat::Lit e);
  bool is_const(sat::Lit l) const { return sat::var_of(l) == sat::var_of(true_); }

  using Bits = std::vector<sat::Lit>;
  Bits add(const Bits& a, const Bits& b, sat::Lit carry);
  Bits neg(const Bits& a);
  Bits mul(const Bits& a, const Bits& b);
  void udivrem(const Bits& a, const Bits& b, Bits& q, Bits& r);
  Bits mux(sat::Lit c, const Bits& t, const Bits& e);
  Bits absval(const Bits& a);
  sat::Lit ult(const Bits& a, const Bits& b);
  sat::Lit slt(const Bits& a, const Bits& b);
  sat::Lit eq(const Bits& a, const Bits& b);
  sat::Lit is_zero(const Bits& a);

  const TermManager& tm_;
  sat::Solver& s_;
  unsigned w_;
  sat::Lit true_;
  std::unordered_map<TermId, sat::Lit> bool_;
  std::unordered_map<TermId, Bits> bv_;
  std::map<std::size_t, Bits> vars_;
  std::map<std::tuple<int, sat::Lit, sat::Lit, sat::Lit>, sat::Lit> gates_;
};

}  // namespace recveq::vc
