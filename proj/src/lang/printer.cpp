#include "recveq/lang/printer.hpp"

#include <sstream>

namespace recveq::lang {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr int kUnaryPrec = 10;
constexpr int kPrimaryPrec = 11;

int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::LogOr: return 1;
    case BinaryOp::LogAnd: return 2;
    case BinaryOp::BitOr: return 3;
    case BinaryOp::BitXor: return 4;
    case BinaryOp::BitAnd: return 5;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 6;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 7;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 8;
    default: return 9;
  }
}

const char* spelling(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::LogAnd: return "&&";
    case BinaryOp::LogOr: return "||";
    case BinaryOp::BitAnd: return "&";
    case BinaryOp::BitOr: return "|";
    case BinaryOp::BitXor: return "^";
  }
  return "?";
}

int precedence(const ExprPtr& e) {
  if (auto* b = std::get_if<Binary>(&e->node)) return precedence(b->op);
  if (std::holds_alternative<Unary>(e->node)) return kUnaryPrec;
  if (auto* l = std::get_if<IntLit>(&e->node); l && l->value < 0) return kUnaryPrec;
  return kPrimaryPrec;
}

void print_expr(std::ostream& os, const ExprPtr& e);

void print_operand(std::ostream& os, const ExprPtr& e, bool parens) {
  if (parens) os << '(';
  print_expr(os, e);
  if (parens) os << ')';
}

void print_args(std::ostream& os, const std::vector<ExprPtr>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) os << ", ";
    print_expr(os, args[i]);
  }
}

void print_expr(std::ostream& os, const ExprPtr& e) {
  std::visit(overloaded{
                 [&](const IntLit& x) { os << x.value; },
                 [&](const VarRef& x) { os << x.name; },
                 [&](const Unary& x) {
                   os << (x.op == UnaryOp::Neg ? "-" : x.op == UnaryOp::LogNot ? "!" : "~");
                   bool parens = precedence(x.operand) < kUnaryPrec ||
                                 (x.op == UnaryOp::Neg && std::holds_alternative<IntLit>(x.operand->node));
                   print_operand(os, x.operand, parens);
                 },
                 [&](const Binary& x) {
                   int p = precedence(x.op);
                   print_operand(os, x.lhs, precedence(x.lhs) < p);
                   os << ' ' << spelling(x.op) << ' ';
                   print_operand(os, x.rhs, precedence(x.rhs) <= p);
                 },
                 [&](const Call& x) {
                   os << x.callee << '(';
                   print_args(os, x.args);
                   os << ')';
                 },
                 [&](const Nondet&) { os << "nondet()"; },
                 [&](const Intrinsic& x) {
                   os << (x.kind == IntrinsicKind::LeavesEqual ? "__rv_leaves_equal(" : "__rv_size_at_least(") << x.a
                      << ", " << x.b << ')';
                 },
             },
             e->node);
}

std::string pad(int indent) { return std::string(static_cast<std::size_t>(indent) * 2, ' '); }

void print_stmt(std::ostream& os, const StmtPtr& s, int indent);

// Prints the body of an if/while/else: blocks open on the same line.
void print_body(std::ostream& os, const StmtPtr& s, int indent) {
  if (auto* b = std::get_if<Block>(&s->node)) {
    os << "{\n";
    for (auto& st : b->stmts) print_stmt(os, st, indent + 1);
    os << pad(indent) << '}';
  } else {
    std::ostringstream inner;
    print_stmt(inner, s, 0);
    std::string text = inner.str();
    if (!text.empty() && text.back() == '\n') text.pop_back();
    os << text;
  }
}

void print_stmt(std::ostream& os, const StmtPtr& s, int indent) {
  os << pad(indent);
  std::visit(overloaded{
                 [&](const Block&) {
                   print_body(os, s, indent);
                   os << '\n';
                 },
                 [&](const Decl& x) {
                   os << "int " << x.name;
                   if (x.init) {
                     os << " = ";
                     print_expr(os, x.init);
                   }
                   os << ";\n";
                 },
                 [&](const Assign& x) {
                   os << x.target << " = ";
                   print_expr(os, x.value);
                   os << ";\n";
                 },
                 [&](const MultiAssign& x) {
                   os << '(';
                   for (std::size_t i = 0; i < x.targets.size(); ++i) os << (i ? ", " : "") << x.targets[i];
                   os << ") = ";
                   print_expr(os, x.call);
                   os << ";\n";
                 },
                 [&](const If& x) {
                   os << "if (";
                   print_expr(os, x.cond);
                   os << ") ";
                   print_body(os, x.then_branch, indent);
                   if (x.else_branch) {
                     bool block = std::holds_alternative<Block>(x.then_branch->node);
                     if (block)
                       os << " else ";
                     else
                       os << '\n' << pad(indent) << "else ";
                     print_body(os, x.else_branch, indent);
                   }
                   os << '\n';
                 },
                 [&](const While& x) {
                   os << "while (";
                   print_expr(os, x.cond);
                   os << ") ";
                   print_body(os, x.body, indent);
                   os << '\n';
                 },
                 [&](const Return& x) {
                   os << "return ";
                   if (x.values.size() == 1) {
                     print_expr(os, x.values[0]);
                   } else {
                     os << '(';
                     print_args(os, x.values);
                     os << ')';
                   }
                   os << ";\n";
                 },
                 [&](const Assume& x) {
                   os << (x.engine_owned ? "__rv_assume(" : "assume(");
                   print_expr(os, x.cond);
                   os << ");\n";
                 },
                 [&](const Assert& x) {
                   os << "assert(";
                   print_expr(os, x.cond);
                   os << ");\n";
                 },
                 [&](const ExprStmt& x) {
                   print_expr(os, x.expr);
                   os << ";\n";
                 },
                 [&](const Record& x) {
                   os << "__rv_record(" << x.store;
                   for (auto& v : x.values) {
                     os << ", ";
                     print_expr(os, v);
                   }
                   os << ");\n";
                 },
             },
             s->node);
}

}  // namespace

std::string print(const ExprPtr& e) {
  std::ostringstream os;
  print_expr(os, e);
  return os.str();
}

std::string print(const StmtPtr& s, int indent) {
  std::ostringstream os;
  print_stmt(os, s, indent);
  return os.str();
}

std::string print(const FunctionDef& f) {
  std::ostringstream os;
  os << "int " << f.name << '(';
  for (std::size_t i = 0; i < f.params.size(); ++i) os << (i ? ", " : "") << "int " << f.params[i];
  os << ") ";
  print_body(os, f.body, 0);
  os << '\n';
  return os.str();
}

std::string print(const SourceUnit& u) {
  std::ostringstream os;
  for (auto& g : u.globals) os << "int " << g.name << " = " << g.init << ";\n";
  for (auto& uf : u.ufs) {
    os << "int " << uf.name << '(';
    for (std::size_t i = 0; i < uf.arity; ++i) os << (i ? ", " : "") << "int a" << i;
    os << ");\n";
  }
  bool first = u.globals.empty() && u.ufs.empty();
  for (auto& f : u.functions) {
    if (!first) os << '\n';
    first = false;
    os << print(f);
  }
  return os.str();
}

}  // namespace recveq::lang
