#include "recveq/vc/term.hpp"

#include <algorithm>
#include <sstream>

#include "recveq/common.hpp"

namespace recveq::vc {

bool is_bool_op(Op op) { return op <= Op::BoolIte; }

std::size_t TermManager::KeyHash::operator()(const Key& k) const {
  std::size_t h = static_cast<std::size_t>(k.op) * 0x9e3779b97f4a7c15ULL ^ static_cast<std::size_t>(k.value);
  for (auto c : k.kids) h = (h ^ c) * 0x100000001b3ULL + 0x7f4a7c15;
  return h;
}

TermManager::TermManager(unsigned width) : width_(width) {
  if (width > 64) throw Error("WidthOverflowUnsupported: width " + std::to_string(width) + " exceeds 64 bits");
  if (width < 1) throw Error("width must be positive");
  true_ = intern(Op::True, {});
  false_ = intern(Op::False, {});
}

TermId TermManager::intern(Op op, std::vector<TermId> kids, std::int64_t value) {
  Key key{op, value, kids};
  auto it = table_.find(key);
  if (it != table_.end()) return it->second;
  TermId id = static_cast<TermId>(nodes_.size());
  nodes_.push_back(Node{op, value, std::move(kids)});
  table_.emplace(std::move(key), id);
  return id;
}

bool TermManager::is_const(TermId t) const {
  Op op = nodes_[t].op;
  return op == Op::Const || op == Op::True || op == Op::False;
}

std::int64_t TermManager::const_value(TermId t) const {
  const Node& n = nodes_[t];
  if (n.op == Op::True) return 1;
  if (n.op == Op::False) return 0;
  return n.value;
}

TermId TermManager::mk_const(std::int64_t v) { return intern(Op::Const, {}, bv::wrap(v, width_)); }

TermId TermManager::mk_var(const std::string& name, bool is_bool, oracle::ValueKey key) {
  std::int64_t index = static_cast<std::int64_t>(vars_.size());
  vars_.push_back({name, is_bool, std::move(key)});
  TermId t = intern(is_bool ? Op::BoolVar : Op::BvVar, {}, index);
  var_terms_.push_back(t);
  return t;
}

std::pair<TermId, std::int64_t> TermManager::affine(TermId t) const {
  const Node& n = nodes_[t];
  if (n.op == Op::Const) return {kNoTerm, n.value};
  if (n.op == Op::Add && nodes_[n.kids[1]].op == Op::Const) return {n.kids[0], nodes_[n.kids[1]].value};
  return {t, 0};
}

TermId TermManager::mk_not(TermId a) {
  const Node& n = nodes_[a];
  if (n.op == Op::True) return false_;
  if (n.op == Op::False) return true_;
  if (n.op == Op::Not) return n.kids[0];
  return intern(Op::Not, {a});
}

TermId TermManager::mk_and(TermId a, TermId b) {
  if (a == false_ || b == false_) return false_;
  if (a == true_) return b;
  if (b == true_) return a;
  if (a == b) return a;
  if (mk_not(a) == b) return false_;
  if (a > b) std::swap(a, b);
  return intern(Op::And, {a, b});
}

TermId TermManager::mk_and(const std::vector<TermId>& xs) {
  TermId acc = true_;
  for (auto x : xs) acc = mk_and(acc, x);
  return acc;
}

TermId TermManager::mk_or(TermId a, TermId b) {
  if (a == true_ || b == true_) return true_;
  if (a == false_) return b;
  if (b == false_) return a;
  if (a == b) return a;
  if (mk_not(a) == b) return true_;
  if (a > b) std::swap(a, b);
  return intern(Op::Or, {a, b});
}

TermId TermManager::mk_or(const std::vector<TermId>& xs) {
  TermId acc = false_;
  for (auto x : xs) acc = mk_or(acc, x);
  return acc;
}

TermId TermManager::mk_eq(TermId a, TermId b) {
  if (a == b) return true_;
  if (is_bool(a)) {
    if (a == true_) return b;
    if (b == true_) return a;
    if (a == false_) return mk_not(b);
    if (b == false_) return mk_not(a);
    if (a > b) std::swap(a, b);
    return intern(Op::Eq, {a, b});
  }
  auto [ba, oa] = affine(a);
  auto [bb, ob] = affine(b);
  if (ba == bb) return mk_bool(oa == ob);
  if (ba == kNoTerm) {
    std::swap(ba, bb);
    std::swap(oa, ob);
  }
  if (bb == kNoTerm) {
    // base + oa == ob  <=>  base == ob - oa
    std::int64_t k = bv::sub(ob, oa, width_);
    const Node& n = nodes_[ba];
    if (n.op == Op::Ite && is_const(n.kids[1]) && is_const(n.kids[2])) {
      bool t = const_value(n.kids[1]) == k, e = const_value(n.kids[2]) == k;
      if (t && e) return true_;
      if (!t && !e) return false_;
      return t ? n.kids[0] : mk_not(n.kids[0]);
    }
    TermId kc = mk_const(k);
    return intern(Op::Eq, {std::min(ba, kc), std::max(ba, kc)});
  }
  if (a > b) std::swap(a, b);
  return intern(Op::Eq, {a, b});
}

TermId TermManager::mk_slt(TermId a, TermId b) {
  if (a == b) return false_;
  if (is_const(a) && is_const(b)) return mk_bool(const_value(a) < const_value(b));
  return intern(Op::Slt, {a, b});
}

TermId TermManager::mk_sle(TermId a, TermId b) {
  if (a == b) return true_;
  if (is_const(a) && is_const(b)) return mk_bool(const_value(a) <= const_value(b));
  return intern(Op::Sle, {a, b});
}

TermId TermManager::mk_ite(TermId c, TermId a, TermId b) {
  if (c == true_) return a;
  if (c == false_) return b;
  if (a == b) return a;
  if (is_bool(a)) {
    if (a == true_ && b == false_) return c;
    if (a == false_ && b == true_) return mk_not(c);
    if (a == true_) return mk_or(c, b);
    if (a == false_) return mk_and(mk_not(c), b);
    if (b == false_) return mk_and(c, a);
    if (b == true_) return mk_or(mk_not(c), a);
    return intern(Op::BoolIte, {c, a, b});
  }
  if (nodes_[a].op == Op::Ite && nodes_[a].kids[0] == c) a = nodes_[a].kids[1];
  if (nodes_[b].op == Op::Ite && nodes_[b].kids[0] == c) b = nodes_[b].kids[2];
  if (a == b) return a;
  if (nodes_[c].op == Op::Not) return mk_ite(nodes_[c].kids[0], b, a);
  return intern(Op::Ite, {c, a, b});
}

TermId TermManager::mk_add(TermId a, TermId b) {
  if (is_const(a) && is_const(b)) return mk_const(bv::add(const_value(a), const_value(b), width_));
  auto [ba, oa] = affine(a);
  auto [bb, ob] = affine(b);
  std::int64_t off = bv::add(oa, ob, width_);
  TermId core;
  if (ba == kNoTerm)
    core = bb;
  else if (bb == kNoTerm)
    core = ba;
  else
    core = intern(Op::Add, {std::min(ba, bb), std::max(ba, bb)});
  if (off == 0) return core;
  return intern(Op::Add, {core, mk_const(off)});
}

TermId TermManager::mk_sub(TermId a, TermId b) {
  if (is_const(b)) return mk_add(a, mk_const(bv::neg(const_value(b), width_)));
  auto [ba, oa] = affine(a);
  auto [bb, ob] = affine(b);
  if (ba == bb) return mk_const(bv::sub(oa, ob, width_));
  std::int64_t off = bv::sub(oa, ob, width_);
  TermId core = ba == kNoTerm ? mk_neg(bb) : intern(Op::Sub, {ba, bb});
  if (off == 0) return core;
  return intern(Op::Add, {core, mk_const(off)});
}

TermId TermManager::mk_neg(TermId a) {
  if (is_const(a)) return mk_const(bv::neg(const_value(a), width_));
  if (nodes_[a].op == Op::Neg) return nodes_[a].kids[0];
  return intern(Op::Neg, {a});
}

TermId TermManager::mk_mul(TermId a, TermId b) {
  if (is_const(a) && is_const(b)) return mk_const(bv::mul(const_value(a), const_value(b), width_));
  if (is_const(a)) std::swap(a, b);
  if (is_const(b)) {
    if (const_value(b) == 0) return b;
    if (const_value(b) == 1) return a;
  }
  if (!is_const(b) && a > b) std::swap(a, b);
  return intern(Op::Mul, {a, b});
}

TermId TermManager::mk_sdiv(TermId a, TermId b) {
  if (is_const(a) && is_const(b)) return mk_const(bv::sdiv(const_value(a), const_value(b), width_));
  if (is_const(b) && const_value(b) == 1) return a;
  if (is_const(b) && const_value(b) == 0) return mk_const(0);
  return intern(Op::SDiv, {a, b});
}

TermId TermManager::mk_srem(TermId a, TermId b) {
  if (is_const(a) && is_const(b)) return mk_const(bv::srem(const_value(a), const_value(b), width_));
  if (is_const(b) && (const_value(b) == 1 || const_value(b) == 0 || const_value(b) == -1)) return mk_const(0);
  return intern(Op::SRem, {a, b});
}

TermId TermManager::mk_bvand(TermId a, TermId b) {
  if (is_const(a) && is_const(b)) return mk_const(const_value(a) & const_value(b));
  if (is_const(a)) std::swap(a, b);
  if (is_const(b)) {
    if (const_value(b) == 0) return b;
    if (const_value(b) == -1) return a;
  }
  if (a == b) return a;
  if (!is_const(b) && a > b) std::swap(a, b);
  return intern(Op::BvAnd, {a, b});
}

TermId TermManager::mk_bvor(TermId a, TermId b) {
  if (is_const(a) && is_const(b)) return mk_const(const_value(a) | const_value(b));
  if (is_const(a)) std::swap(a, b);
  if (is_const(b)) {
    if (const_value(b) == 0) return a;
    if (const_value(b) == -1) return b;
  }
  if (a == b) return a;
  if (!is_const(b) && a > b) std::swap(a, b);
  return intern(Op::BvOr, {a, b});
}

TermId TermManager::mk_bvxor(TermId a, TermId b) {
  if (is_const(a) && is_const(b)) return mk_const(const_value(a) ^ const_value(b));
  if (is_const(a)) std::swap(a, b);
  if (is_const(b) && const_value(b) == 0) return a;
  if (a == b) return mk_const(0);
  if (!is_const(b) && a > b) std::swap(a, b);
  return intern(Op::BvXor, {a, b});
}

TermId TermManager::mk_bvnot(TermId a) {
  if (is_const(a)) return mk_const(~const_value(a));
  if (nodes_[a].op == Op::BvNot) return nodes_[a].kids[0];
  return intern(Op::BvNot, {a});
}

TermId TermManager::to_bool(TermId t) {
  if (is_bool(t)) return t;
  return mk_not(mk_eq(t, mk_const(0)));
}

TermId TermManager::to_bv(TermId b) {
  if (!is_bool(b)) return b;
  return mk_ite(b, mk_const(1), mk_const(0));
}

std::vector<TermId> TermManager::reachable(const std::vector<TermId>& roots) const {
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<TermId> stack(roots.begin(), roots.end());
  while (!stack.empty()) {
    TermId t = stack.back();
    stack.pop_back();
    if (seen[t]) continue;
    seen[t] = 1;
    for (auto k : nodes_[t].kids) stack.push_back(k);
  }
  std::vector<TermId> out;
  for (TermId t = 0; t < nodes_.size(); ++t)
    if (seen[t]) out.push_back(t);
  return out;
}

std::vector<std::size_t> TermManager::free_vars(const std::vector<TermId>& roots) const {
  std::vector<std::size_t> out;
  for (auto t : reachable(roots)) {
    const Node& n = nodes_[t];
    if (n.op == Op::BoolVar || n.op == Op::BvVar) out.push_back(static_cast<std::size_t>(n.value));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::int64_t TermManager::eval(TermId root, const std::vector<std::int64_t>& values) const {
  const Node& r = nodes_[root];
  if (r.op == Op::BvVar) return bv::wrap(values[static_cast<std::size_t>(r.value)], width_);
  if (r.op == Op::BoolVar) return values[static_cast<std::size_t>(r.value)] != 0;
  if (r.op == Op::Const) return r.value;
  return eval_many({root}, values)[0];
}

std::vector<std::int64_t> TermManager::eval_many(const std::vector<TermId>& roots,
                                                 const std::vector<std::int64_t>& values) const {
  std::vector<std::int64_t> val(nodes_.size(), 0);
  for (auto t : reachable(roots)) {
    const Node& n = nodes_[t];
    auto k = [&](int i) { return val[n.kids[static_cast<std::size_t>(i)]]; };
    std::int64_t v = 0;
    const unsigned w = width_;
    switch (n.op) {
      case Op::True: v = 1; break;
      case Op::False: v = 0; break;
      case Op::BoolVar: v = values[static_cast<std::size_t>(n.value)] != 0; break;
      case Op::BvVar: v = bv::wrap(values[static_cast<std::size_t>(n.value)], w); break;
      case Op::Const: v = n.value; break;
      case Op::Not: v = !k(0); break;
      case Op::And: v = k(0) && k(1); break;
      case Op::Or: v = k(0) || k(1); break;
      case Op::Eq: v = k(0) == k(1); break;
      case Op::Slt: v = k(0) < k(1); break;
      case Op::Sle: v = k(0) <= k(1); break;
      case Op::BoolIte:
      case Op::Ite: v = k(0) ? k(1) : k(2); break;
      case Op::Add: v = bv::add(k(0), k(1), w); break;
      case Op::Sub: v = bv::sub(k(0), k(1), w); break;
      case Op::Mul: v = bv::mul(k(0), k(1), w); break;
      case Op::SDiv: v = bv::sdiv(k(0), k(1), w); break;
      case Op::SRem: v = bv::srem(k(0), k(1), w); break;
      case Op::Neg: v = bv::neg(k(0), w); break;
      case Op::BvAnd: v = k(0) & k(1); break;
      case Op::BvOr: v = k(0) | k(1); break;
      case Op::BvXor: v = k(0) ^ k(1); break;
      case Op::BvNot: v = bv::wrap(~k(0), w); break;
    }
    val[t] = v;
  }
  std::vector<std::int64_t> out;
  for (auto t : roots) out.push_back(val[t]);
  return out;
}

std::string TermManager::to_string(TermId t) const {
  const Node& n = nodes_[t];
  static const char* names[] = {"true", "false", "bvar", "not",  "and",  "or",    "=",     "slt",
                                "sle",  "ite",   "const", "var", "+",    "-",     "*",     "sdiv",
                                "srem", "neg",   "bvand", "bvor", "bvxor", "bvnot", "ite"};
  switch (n.op) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Const: return std::to_string(n.value);
    case Op::BoolVar:
    case Op::BvVar: return vars_[static_cast<std::size_t>(n.value)].name;
    default: break;
  }
  std::ostringstream os;
  os << '(' << names[static_cast<int>(n.op)];
  for (auto k : n.kids) os << ' ' << to_string(k);
  os << ')';
  return os.str();
}

}  // namespace recveq::vc
