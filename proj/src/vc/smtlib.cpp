#include <cctype>
#include <map>
#include <sstream>

#include "recveq/vc/encoder.hpp"

namespace recveq::vc {

namespace {

std::string bv_const(std::int64_t v, unsigned w) {
  std::ostringstream os;
  os << "(_ bv" << bv::to_unsigned(v, w) << ' ' << w << ')';
  return os.str();
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
  return out;
}

}  // namespace

std::string emit_smtlib(const TermManager& tm, const std::vector<TermId>& conjuncts, const std::vector<UfApp>& uf_apps) {
  const unsigned w = tm.width();
  const std::string sort = "(_ BitVec " + std::to_string(w) + ")";
  std::ostringstream os;
  os << "(set-logic " << (uf_apps.empty() ? "QF_BV" : "QF_UFBV") << ")\n";
  std::vector<TermId> roots = conjuncts;
  for (auto& app : uf_apps) {
    roots.push_back(app.result);
    roots.insert(roots.end(), app.args.begin(), app.args.end());
  }
  for (auto v : tm.free_vars(roots))
    os << "(declare-fun v" << v << "_" << sanitize(tm.vars()[v].name) << " () " << (tm.vars()[v].is_bool ? "Bool" : sort)
       << ")\n";
  std::map<std::string, std::size_t> ufs;
  for (auto& app : uf_apps) ufs.emplace(app.symbol, app.args.size());
  for (auto& [name, arity] : ufs) {
    os << "(declare-fun uf_" << sanitize(name) << " (";
    for (std::size_t i = 0; i < arity; ++i) os << (i ? " " : "") << sort;
    os << ") " << sort << ")\n";
  }
  auto ref = [&](TermId t) -> std::string {
    const Node& n = tm.node(t);
    switch (n.op) {
      case Op::True: return "true";
      case Op::False: return "false";
      case Op::Const: return bv_const(n.value, w);
      case Op::BoolVar:
      case Op::BvVar: {
        auto v = static_cast<std::size_t>(n.value);
        return "v" + std::to_string(v) + "_" + sanitize(tm.vars()[v].name);
      }
      default: return "t" + std::to_string(t);
    }
  };
  static const std::map<Op, const char*> names = {
      {Op::Not, "not"},     {Op::And, "and"},     {Op::Or, "or"},     {Op::Eq, "="},          {Op::Slt, "bvslt"},
      {Op::Sle, "bvsle"},   {Op::BoolIte, "ite"}, {Op::Ite, "ite"},   {Op::Add, "bvadd"},     {Op::Sub, "bvsub"},
      {Op::Mul, "bvmul"},   {Op::Neg, "bvneg"},   {Op::BvAnd, "bvand"}, {Op::BvOr, "bvor"},  {Op::BvXor, "bvxor"},
      {Op::BvNot, "bvnot"},
  };
  const std::string zero = bv_const(0, w);
  for (auto t : tm.reachable(roots)) {
    const Node& n = tm.node(t);
    if (n.kids.empty()) continue;
    std::string body;
    auto k = [&](int i) { return ref(n.kids[static_cast<std::size_t>(i)]); };
    if (n.op == Op::SDiv) {
      // division by zero is 0 in the source language
      body = "(ite (= " + k(1) + " " + zero + ") " + zero + " (bvsdiv " + k(0) + " " + k(1) + "))";
    } else if (n.op == Op::SRem) {
      body = "(ite (= " + k(1) + " " + zero + ") " + zero + " (bvsrem " + k(0) + " " + k(1) + "))";
    } else {
      body = std::string("(") + names.at(n.op);
      for (std::size_t i = 0; i < n.kids.size(); ++i) body += " " + k(static_cast<int>(i));
      body += ")";
    }
    os << "(define-fun t" << t << " () " << (tm.is_bool(t) ? "Bool" : sort) << ' ' << body << ")\n";
  }
  for (auto& app : uf_apps) {
    os << "(assert (= " << ref(app.result) << " (uf_" << sanitize(app.symbol);
    for (auto a : app.args) os << ' ' << ref(a);
    os << ")))\n";
  }
  for (auto c : conjuncts) os << "(assert " << ref(c) << ")\n";
  os << "(check-sat)\n(exit)\n";
  return os.str();
}

std::string emit_smtlib(const Encoding& enc) {
  std::vector<TermId> q = enc.constraints;
  q.push_back(enc.violation);
  return emit_smtlib(*enc.tm, q, enc.uf_apps);
}

}  // namespace recveq::vc
