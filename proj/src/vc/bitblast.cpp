#include "recveq/vc/bitblast.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_set>

namespace recveq::vc {

using sat::Lit;
using sat::negate;

BitBlaster::BitBlaster(const TermManager& tm, sat::Solver& solver) : tm_(tm), s_(solver), w_(tm.width()) {
  true_ = sat::mk_lit(s_.new_var());
  s_.add_clause({true_});
}

Lit BitBlaster::fresh() { return sat::mk_lit(s_.new_var()); }

Lit BitBlaster::mk_and(Lit a, Lit b) {
  const Lit f = negate(true_);
  if (a == f || b == f) return f;
  if (a == true_) return b;
  if (b == true_) return a;
  if (a == b) return a;
  if (a == negate(b)) return f;
  if (a > b) std::swap(a, b);
  auto key = std::make_tuple(0, a, b, Lit{0});
  if (auto it = gates_.find(key); it != gates_.end()) return it->second;
  Lit g = fresh();
  s_.add_clause({negate(g), a});
  s_.add_clause({negate(g), b});
  s_.add_clause({g, negate(a), negate(b)});
  gates_.emplace(key, g);
  return g;
}

Lit BitBlaster::mk_xor(Lit a, Lit b) {
  if (is_const(a)) return a == true_ ? negate(b) : b;
  if (is_const(b)) return b == true_ ? negate(a) : a;
  if (a == b) return negate(true_);
  if (a == negate(b)) return true_;
  // normalize polarities: xor(~a, b) = ~xor(a, b)
  bool flip = false;
  if (sat::sign_of(a)) {
    a = negate(a);
    flip = !flip;
  }
  if (sat::sign_of(b)) {
    b = negate(b);
    flip = !flip;
  }
  if (a > b) std::swap(a, b);
  auto key = std::make_tuple(1, a, b, Lit{0});
  Lit g;
  if (auto it = gates_.find(key); it != gates_.end()) {
    g = it->second;
  } else {
    g = fresh();
    s_.add_clause({negate(g), a, b});
    s_.add_clause({negate(g), negate(a), negate(b)});
    s_.add_clause({g, negate(a), b});
    s_.add_clause({g, a, negate(b)});
    gates_.emplace(key, g);
  }
  return flip ? negate(g) : g;
}

Lit BitBlaster::mk_mux(Lit c, Lit t, Lit e) {
  if (c == true_) return t;
  if (c == negate(true_)) return e;
  if (t == e) return t;
  if (t == true_) return mk_or(c, e);
  if (t == negate(true_)) return mk_and(negate(c), e);
  if (e == true_) return mk_or(negate(c), t);
  if (e == negate(true_)) return mk_and(c, t);
  if (sat::sign_of(c)) {
    c = negate(c);
    std::swap(t, e);
  }
  auto key = std::make_tuple(2, c, t, e);
  if (auto it = gates_.find(key); it != gates_.end()) return it->second;
  Lit g = fresh();
  s_.add_clause({negate(c), negate(t), g});
  s_.add_clause({negate(c), t, negate(g)});
  s_.add_clause({c, negate(e), g});
  s_.add_clause({c, e, negate(g)});
  s_.add_clause({negate(t), negate(e), g});
  s_.add_clause({t, e, negate(g)});
  gates_.emplace(key, g);
  return g;
}

BitBlaster::Bits BitBlaster::add(const Bits& a, const Bits& b, Lit carry) {
  Bits out(w_);
  for (unsigned i = 0; i < w_; ++i) {
    Lit x = mk_xor(a[i], b[i]);
    out[i] = mk_xor(x, carry);
    if (i + 1 < w_) carry = mk_or(mk_and(a[i], b[i]), mk_and(x, carry));
  }
  return out;
}

BitBlaster::Bits BitBlaster::neg(const Bits& a) {
  Bits inv(w_), zero(w_, negate(true_));
  for (unsigned i = 0; i < w_; ++i) inv[i] = negate(a[i]);
  return add(inv, zero, true_);
}

BitBlaster::Bits BitBlaster::mul(const Bits& a, const Bits& b) {
  Bits acc(w_, negate(true_));
  for (unsigned i = 0; i < w_; ++i) {
    if (b[i] == negate(true_)) continue;
    Bits row(w_, negate(true_));
    for (unsigned j = 0; i + j < w_; ++j) row[i + j] = mk_and(a[j], b[i]);
    acc = add(acc, row, negate(true_));
  }
  return acc;
}

BitBlaster::Bits BitBlaster::mux(Lit c, const Bits& t, const Bits& e) {
  Bits out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = mk_mux(c, t[i], e[i]);
  return out;
}

BitBlaster::Bits BitBlaster::absval(const Bits& a) { return mux(a[w_ - 1], neg(a), a); }

// Restoring division on unsigned operands of width w.
void BitBlaster::udivrem(const Bits& a, const Bits& b, Bits& q, Bits& r) {
  const Lit f = negate(true_);
  q.assign(w_, f);
  r.assign(w_, f);
  // remainder kept one bit wider to avoid overflow on the shift
  Bits bx = b;
  bx.push_back(f);
  Bits nb(w_ + 1);
  {
    // two's complement of b at width w+1
    Bits inv(w_ + 1);
    for (unsigned i = 0; i <= w_; ++i) inv[i] = negate(bx[i]);
    Lit carry = true_;
    for (unsigned i = 0; i <= w_; ++i) {
      nb[i] = mk_xor(inv[i], carry);
      carry = mk_and(inv[i], carry);
    }
  }
  Bits rem(w_ + 1, f);
  for (int i = static_cast<int>(w_) - 1; i >= 0; --i) {
    // rem = (rem << 1) | a[i]
    for (unsigned k = w_; k > 0; --k) rem[k] = rem[k - 1];
    rem[0] = a[static_cast<unsigned>(i)];
    // diff = rem - b
    Bits diff(w_ + 1);
    Lit carry = negate(true_);
    for (unsigned k = 0; k <= w_; ++k) {
      Lit x = mk_xor(rem[k], nb[k]);
      diff[k] = mk_xor(x, carry);
      carry = mk_or(mk_and(rem[k], nb[k]), mk_and(x, carry));
    }
    Lit ge = negate(diff[w_]);  // no borrow
    q[static_cast<unsigned>(i)] = ge;
    rem = mux(ge, diff, rem);
  }
  for (unsigned k = 0; k < w_; ++k) r[k] = rem[k];
}

Lit BitBlaster::ult(const Bits& a, const Bits& b) {
  Lit lt = negate(true_);
  for (unsigned i = 0; i < a.size(); ++i) {
    Lit here = mk_and(negate(a[i]), b[i]);
    Lit same = negate(mk_xor(a[i], b[i]));
    lt = mk_or(here, mk_and(same, lt));
  }
  return lt;
}

Lit BitBlaster::slt(const Bits& a, const Bits& b) {
  Bits x = a, y = b;
  x[w_ - 1] = negate(x[w_ - 1]);
  y[w_ - 1] = negate(y[w_ - 1]);
  return ult(x, y);
}

Lit BitBlaster::eq(const Bits& a, const Bits& b) {
  Lit acc = true_;
  for (unsigned i = 0; i < a.size(); ++i) acc = mk_and(acc, negate(mk_xor(a[i], b[i])));
  return acc;
}

Lit BitBlaster::is_zero(const Bits& a) {
  Lit acc = true_;
  for (Lit l : a) acc = mk_and(acc, negate(l));
  return acc;
}

const std::vector<Lit>& BitBlaster::var_bits(std::size_t index) {
  auto it = vars_.find(index);
  if (it != vars_.end()) return it->second;
  Bits bits;
  unsigned n = tm_.vars()[index].is_bool ? 1 : w_;
  for (unsigned i = 0; i < n; ++i) bits.push_back(fresh());
  return vars_.emplace(index, std::move(bits)).first->second;
}

Lit BitBlaster::blast_bool(TermId t) {
  blast(t);
  return bool_.at(t);
}

const std::vector<Lit>& BitBlaster::blast_bv(TermId t) {
  blast(t);
  return bv_.at(t);
}

void BitBlaster::blast(TermId root) {
  if (bool_.count(root) || bv_.count(root)) return;
  const Lit f = negate(true_);
  // only the part not blasted yet; kids have smaller ids than their parents
  std::vector<TermId> todo{root}, order;
  std::unordered_set<TermId> seen{root};
  while (!todo.empty()) {
    TermId t = todo.back();
    todo.pop_back();
    order.push_back(t);
    for (auto k : tm_.node(t).kids)
      if (!bool_.count(k) && !bv_.count(k) && seen.insert(k).second) todo.push_back(k);
  }
  std::sort(order.begin(), order.end());
  for (TermId t : order) {
    const Node& n = tm_.node(t);
    auto B = [&](int i) { return bool_.at(n.kids[static_cast<std::size_t>(i)]); };
    auto V = [&](int i) -> const Bits& { return bv_.at(n.kids[static_cast<std::size_t>(i)]); };
    switch (n.op) {
      case Op::True: bool_[t] = true_; break;
      case Op::False: bool_[t] = f; break;
      case Op::BoolVar: bool_[t] = var_bits(static_cast<std::size_t>(n.value))[0]; break;
      case Op::Not: bool_[t] = negate(B(0)); break;
      case Op::And: bool_[t] = mk_and(B(0), B(1)); break;
      case Op::Or: bool_[t] = mk_or(B(0), B(1)); break;
      case Op::Eq:
        if (tm_.is_bool(n.kids[0]))
          bool_[t] = negate(mk_xor(B(0), B(1)));
        else
          bool_[t] = eq(V(0), V(1));
        break;
      case Op::Slt: bool_[t] = slt(V(0), V(1)); break;
      case Op::Sle: bool_[t] = negate(slt(V(1), V(0))); break;
      case Op::BoolIte: bool_[t] = mk_mux(B(0), B(1), B(2)); break;
      case Op::Const: {
        Bits bits(w_);
        auto u = static_cast<std::uint64_t>(n.value);
        for (unsigned i = 0; i < w_; ++i) bits[i] = ((u >> i) & 1) ? true_ : f;
        bv_[t] = std::move(bits);
        break;
      }
      case Op::BvVar: bv_[t] = var_bits(static_cast<std::size_t>(n.value)); break;
      case Op::Add: bv_[t] = add(V(0), V(1), f); break;
      case Op::Sub: {
        Bits inv(w_);
        for (unsigned i = 0; i < w_; ++i) inv[i] = negate(V(1)[i]);
        bv_[t] = add(V(0), inv, true_);
        break;
      }
      case Op::Mul: bv_[t] = mul(V(0), V(1)); break;
      case Op::SDiv:
      case Op::SRem: {
        const Bits& a = V(0);
        const Bits& b = V(1);
        Bits q, r;
        udivrem(absval(a), absval(b), q, r);
        Bits zero(w_, f);
        Bits res;
        if (n.op == Op::SDiv)
          res = mux(mk_xor(a[w_ - 1], b[w_ - 1]), neg(q), q);
        else
          res = mux(a[w_ - 1], neg(r), r);
        bv_[t] = mux(is_zero(b), zero, res);
        break;
      }
      case Op::Neg: bv_[t] = neg(V(0)); break;
      case Op::BvAnd:
      case Op::BvOr:
      case Op::BvXor: {
        Bits out(w_);
        for (unsigned i = 0; i < w_; ++i) {
          Lit a = V(0)[i], b = V(1)[i];
          out[i] = n.op == Op::BvAnd ? mk_and(a, b) : n.op == Op::BvOr ? mk_or(a, b) : mk_xor(a, b);
        }
        bv_[t] = std::move(out);
        break;
      }
      case Op::BvNot: {
        Bits out(w_);
        for (unsigned i = 0; i < w_; ++i) out[i] = negate(V(0)[i]);
        bv_[t] = std::move(out);
        break;
      }
      case Op::Ite: bv_[t] = mux(B(0), V(1), V(2)); break;
    }
  }
}

}  // namespace recveq::vc
