#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "recveq/oracle.hpp"

namespace recveq::vc {

using TermId = std::uint32_t;

enum class Op : std::uint8_t {
  // boolean sort
  True,
  False,
  BoolVar,
  Not,
  And,
  Or,
  Eq,
  Slt,
  Sle,
  BoolIte,
  // bit-vector sort
  Const,
  BvVar,
  Add,
  Sub,
  Mul,
  SDiv,
  SRem,
  Neg,
  BvAnd,
  BvOr,
  BvXor,
  BvNot,
  Ite,
};

bool is_bool_op(Op op);

struct Node {
  Op op;
  std::int64_t value = 0;  // constant value, or variable index for BoolVar/BvVar
  std::vector<TermId> kids;
};

struct VarInfo {
  std::string name;
  bool is_bool = false;
  oracle::ValueKey key;  // empty when the variable is not a replayable choice
};

/// Hash-consed term DAG over width-W bit-vectors and booleans. Children always
/// have smaller ids than their parents. Constructors fold constants and
/// normalize `x + c` chains so that equal affine forms share one node.
class TermManager {
 public:
  explicit TermManager(unsigned width);

  unsigned width() const { return width_; }
  const Node& node(TermId t) const { return nodes_[t]; }
  std::size_t size() const { return nodes_.size(); }
  bool is_bool(TermId t) const { return is_bool_op(nodes_[t].op); }
  bool is_const(TermId t) const;
  std::int64_t const_value(TermId t) const;

  const std::vector<VarInfo>& vars() const { return vars_; }
  TermId var_term(std::size_t index) const { return var_terms_[index]; }

  TermId mk_true() const { return true_; }
  TermId mk_false() const { return false_; }
  TermId mk_bool(bool b) const { return b ? true_ : false_; }
  TermId mk_const(std::int64_t v);
  TermId mk_var(const std::string& name, bool is_bool, oracle::ValueKey key = {});

  TermId mk_not(TermId a);
  TermId mk_and(TermId a, TermId b);
  TermId mk_and(const std::vector<TermId>& xs);
  TermId mk_or(TermId a, TermId b);
  TermId mk_or(const std::vector<TermId>& xs);
  TermId mk_implies(TermId a, TermId b) { return mk_or(mk_not(a), b); }
  TermId mk_eq(TermId a, TermId b);
  TermId mk_slt(TermId a, TermId b);
  TermId mk_sle(TermId a, TermId b);
  TermId mk_ite(TermId c, TermId a, TermId b);

  TermId mk_add(TermId a, TermId b);
  TermId mk_sub(TermId a, TermId b);
  TermId mk_mul(TermId a, TermId b);
  TermId mk_sdiv(TermId a, TermId b);
  TermId mk_srem(TermId a, TermId b);
  TermId mk_neg(TermId a);
  TermId mk_bvand(TermId a, TermId b);
  TermId mk_bvor(TermId a, TermId b);
  TermId mk_bvxor(TermId a, TermId b);
  TermId mk_bvnot(TermId a);

  TermId to_bool(TermId bv);  // bv != 0
  TermId to_bv(TermId b);     // b ? 1 : 0

  /// Concrete evaluation; `values` is indexed by variable index.
  std::int64_t eval(TermId t, const std::vector<std::int64_t>& values) const;
  std::vector<std::int64_t> eval_many(const std::vector<TermId>& roots, const std::vector<std::int64_t>& values) const;

  /// Variable indices reachable from the given roots, ascending.
  std::vector<std::size_t> free_vars(const std::vector<TermId>& roots) const;
  /// All nodes reachable from the roots, ascending (a topological order).
  std::vector<TermId> reachable(const std::vector<TermId>& roots) const;

  std::string to_string(TermId t) const;

 private:
  struct Key {
    Op op;
    std::int64_t value;
    std::vector<TermId> kids;
    bool operator==(const Key& o) const { return op == o.op && value == o.value && kids == o.kids; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };

  TermId intern(Op op, std::vector<TermId> kids, std::int64_t value = 0);
  // Splits t into (base, offset) with t == base + offset; base is kNoTerm for constants.
  std::pair<TermId, std::int64_t> affine(TermId t) const;

  unsigned width_;
  std::vector<Node> nodes_;
  std::unordered_map<Key, TermId, KeyHash> table_;
  std::vector<VarInfo> vars_;
  std::vector<TermId> var_terms_;
  TermId true_ = 0, false_ = 0;
};

inline constexpr TermId kNoTerm = 0xffffffffu;

/// A conjunction of boolean terms.
struct Formula {
  std::vector<TermId> conjuncts;
};

}  // namespace recveq::vc
