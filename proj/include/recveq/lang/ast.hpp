#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace recveq::lang {

struct SourcePos {
  int line = 0;
  int column = 0;
};

/// Prefix reserved for instrumentation-generated names.
inline constexpr std::string_view kReservedPrefix = "__rv_";

inline bool is_reserved(std::string_view name) { return name.substr(0, kReservedPrefix.size()) == kReservedPrefix; }

struct Expr;
struct Stmt;
using ExprPtr = std::shared_ptr<const Expr>;
using StmtPtr = std::shared_ptr<const Stmt>;

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, LogAnd, LogOr, BitAnd, BitOr, BitXor };
enum class UnaryOp { Neg, LogNot, BitNot };

struct IntLit {
  std::int64_t value;
};
struct VarRef {
  std::string name;
};
struct Unary {
  UnaryOp op;
  ExprPtr operand;
};
struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
/// A call. `site` is the textual index of a recursive call site when the
/// instrumentation needs to track it; -1 otherwise.
struct Call {
  std::string callee;
  std::vector<ExprPtr> args;
  int site = -1;
};
struct Nondet {};

/// Leaf-store queries used by the synchronization program.
enum class IntrinsicKind { LeavesEqual, SizeAtLeast };
struct Intrinsic {
  IntrinsicKind kind;
  int a = 0;
  int b = 0;
};

struct Expr {
  std::variant<IntLit, VarRef, Unary, Binary, Call, Nondet, Intrinsic> node;
  SourcePos pos;
};

struct Block {
  std::vector<StmtPtr> stmts;
};
struct Decl {
  std::string name;
  ExprPtr init;  // may be null
};
struct Assign {
  std::string target;
  ExprPtr value;
};
/// `(a, b) = g(...);` -- destination of a multi-slot return.
struct MultiAssign {
  std::vector<std::string> targets;
  ExprPtr call;
};
struct If {
  ExprPtr cond;
  StmtPtr then_branch;
  StmtPtr else_branch;  // may be null
};
struct While {
  ExprPtr cond;
  StmtPtr body;
};
struct Return {
  std::vector<ExprPtr> values;
};
/// `assume(c)`; engine-owned assumptions print as `__rv_assume(c)` and are the
/// ones replaced by add_assumption(replace = true).
struct Assume {
  ExprPtr cond;
  bool engine_owned = false;
};
struct Assert {
  ExprPtr cond;
};
struct ExprStmt {
  ExprPtr expr;
};
/// Appends (depth, site, args...) to leaf store `store`.
struct Record {
  int store;
  std::vector<ExprPtr> values;
};

struct Stmt {
  std::variant<Block, Decl, Assign, MultiAssign, If, While, Return, Assume, Assert, ExprStmt, Record> node;
  SourcePos pos;
};

struct FunctionDef {
  std::string name;
  std::vector<std::string> params;
  StmtPtr body;  // always a Block
  int return_slots = 1;
  SourcePos pos;
};

/// A body-less prototype: an uninterpreted function symbol.
struct UfDecl {
  std::string name;
  std::size_t arity = 0;
};

struct GlobalDecl {
  std::string name;
  std::int64_t init = 0;
};

struct SourceUnit {
  std::vector<FunctionDef> functions;
  std::vector<UfDecl> ufs;
  std::vector<GlobalDecl> globals;

  const FunctionDef* find(std::string_view name) const;
  FunctionDef* find(std::string_view name);
  const UfDecl* find_uf(std::string_view name) const;
  bool has_name(std::string_view name) const;
  /// Adds or replaces a function by name.
  void put(FunctionDef f);
  void put_uf(UfDecl uf);
  void put_global(GlobalDecl g);
};

namespace mk {

ExprPtr lit(std::int64_t v);
ExprPtr var(std::string name);
ExprPtr unary(UnaryOp op, ExprPtr e);
ExprPtr binary(BinaryOp op, ExprPtr a, ExprPtr b);
ExprPtr call(std::string callee, std::vector<ExprPtr> args, int site = -1);
ExprPtr nondet();
ExprPtr intrinsic(IntrinsicKind kind, int a, int b = 0);
ExprPtr land(ExprPtr a, ExprPtr b);
ExprPtr lor(ExprPtr a, ExprPtr b);
ExprPtr lnot(ExprPtr a);

StmtPtr block(std::vector<StmtPtr> stmts);
StmtPtr decl(std::string name, ExprPtr init);
StmtPtr assign(std::string target, ExprPtr value);
StmtPtr multi_assign(std::vector<std::string> targets, ExprPtr call);
StmtPtr if_(ExprPtr cond, StmtPtr then_branch, StmtPtr else_branch = nullptr);
StmtPtr while_(ExprPtr cond, StmtPtr body);
StmtPtr ret(ExprPtr value);
StmtPtr ret_multi(std::vector<ExprPtr> values);
StmtPtr assume(ExprPtr cond, bool engine_owned = false);
StmtPtr assert_(ExprPtr cond);
StmtPtr expr_stmt(ExprPtr e);
StmtPtr record(int store, std::vector<ExprPtr> values);

}  // namespace mk

/// Literal `true`/`false` predicates as used by the engine.
bool is_true_literal(const ExprPtr& e);
bool is_false_literal(const ExprPtr& e);

/// Structural equality (positions ignored).
bool equal(const ExprPtr& a, const ExprPtr& b);
bool equal(const StmtPtr& a, const StmtPtr& b);
bool equal(const FunctionDef& a, const FunctionDef& b);
bool equal(const SourceUnit& a, const SourceUnit& b);

/// Names of variables referenced by an expression, in first-occurrence order.
std::vector<std::string> free_variables(const ExprPtr& e);
bool contains_call(const ExprPtr& e);

/// Deep copy; call and nondet nodes get fresh identities.
ExprPtr clone(const ExprPtr& e);
StmtPtr clone(const StmtPtr& s);

/// Simultaneous renaming of variables.
ExprPtr rename_vars(const ExprPtr& e, const std::vector<std::string>& from, const std::vector<std::string>& to);
/// Simultaneous substitution of variables by expressions.
ExprPtr substitute(const ExprPtr& e, const std::vector<std::string>& from, const std::vector<ExprPtr>& to);

/// Rewrites call nodes bottom-up. The callback sees the call with already
/// rewritten arguments and returns its replacement (or nullptr to keep it).
using CallRewriter = std::function<ExprPtr(const Call& call, const ExprPtr& rebuilt)>;
ExprPtr rewrite_calls(const ExprPtr& e, const CallRewriter& fn);
StmtPtr rewrite_calls(const StmtPtr& s, const CallRewriter& fn);

/// Bottom-up map: `fn(original, rebuilt)` sees each node after its children
/// were mapped and returns a replacement or nullptr to keep `rebuilt`.
ExprPtr map_expr(const ExprPtr& e, const std::function<ExprPtr(const ExprPtr&, const ExprPtr&)>& fn);
/// Rebuilds a statement tree, mapping each top-level expression through `fe`.
StmtPtr map_stmt_exprs(const StmtPtr& s, const std::function<ExprPtr(const ExprPtr&)>& fe);
void visit_stmt_exprs(const StmtPtr& s, const std::function<void(const ExprPtr&)>& fe);

/// Visits call nodes in textual (pre-order, left-to-right) order.
void visit_calls(const ExprPtr& e, const std::function<void(const Call&)>& fn);
void visit_calls(const StmtPtr& s, const std::function<void(const Call&)>& fn);

}  // namespace recveq::lang
