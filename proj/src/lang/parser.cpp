#include "recveq/lang/parser.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "recveq/common.hpp"

namespace recveq::lang {

namespace {

enum class Tok { End, Ident, Number, Punct };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.pos = {line_, col_};
      if (i_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[i_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = i_;
        while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_')) advance();
        t.kind = Tok::Ident;
        t.text = std::string(src_.substr(start, i_ - start));
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = i_;
        while (i_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[i_]))) advance();
        t.kind = Tok::Number;
        t.text = std::string(src_.substr(start, i_ - start));
      } else {
        static const char* two[] = {"==", "!=", "<=", ">=", "&&", "||"};
        t.kind = Tok::Punct;
        for (const char* op : two) {
          if (src_.substr(i_, 2) == op) {
            t.text = op;
            advance();
            advance();
            break;
          }
        }
        if (t.text.empty()) {
          static const std::string singles = "(){},;=<>+-*/%!&|^~";
          if (singles.find(c) == std::string::npos)
            throw FrontendError("SyntaxError", std::string("unexpected character '") + c + "'", line_, col_);
          t.text = std::string(1, c);
          advance();
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip_space() {
    for (;;) {
      while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) advance();
      if (src_.substr(i_, 2) == "//") {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
        continue;
      }
      if (src_.substr(i_, 2) == "/*") {
        int l = line_, c = col_;
        advance();
        advance();
        while (i_ < src_.size() && src_.substr(i_, 2) != "*/") advance();
        if (i_ >= src_.size()) throw FrontendError("SyntaxError", "unterminated comment", l, c);
        advance();
        advance();
        continue;
      }
      return;
    }
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

ExprPtr at(ExprPtr e, SourcePos pos) {
  auto copy = std::make_shared<Expr>(*e);
  copy->pos = pos;
  return copy;
}

StmtPtr at(StmtPtr s, SourcePos pos) {
  auto copy = std::make_shared<Stmt>(*s);
  copy->pos = pos;
  return copy;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const ParseOptions& opts) : toks_(std::move(toks)), opts_(opts) {}

  SourceUnit unit() {
    SourceUnit u;
    while (peek().kind != Tok::End) {
      SourcePos pos = peek().pos;
      expect_word("int");
      std::string name = ident();
      if (accept("(")) {
        std::vector<std::string> params;
        if (!check(")")) {
          do {
            expect_word("int");
            params.push_back(ident());
          } while (accept(","));
        }
        expect(")");
        if (accept(";")) {
          u.ufs.push_back(UfDecl{name, params.size()});
          continue;
        }
        FunctionDef f;
        f.name = name;
        f.params = std::move(params);
        f.pos = pos;
        max_slots_ = 1;
        f.body = block();
        f.return_slots = max_slots_;
        u.functions.push_back(std::move(f));
      } else {
        internal_only("global variable", pos);
        GlobalDecl g{name, 0};
        if (accept("=")) {
          bool negative = accept("-");
          g.init = number();
          if (negative) g.init = -g.init;
        }
        expect(";");
        u.globals.push_back(g);
      }
    }
    return u;
  }

  ExprPtr expr_only() {
    auto e = expr();
    if (peek().kind != Tok::End) fail("trailing input");
    return e;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string near = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw FrontendError("SyntaxError", msg + " at " + near, t.pos.line, t.pos.column);
  }

  bool check(std::string_view p) const {
    return (peek().kind == Tok::Punct || peek().kind == Tok::Ident) && peek().text == p;
  }
  bool accept(std::string_view p) {
    if (check(p)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(std::string_view p) {
    if (!accept(p)) fail("expected '" + std::string(p) + "'");
  }
  void expect_word(std::string_view w) {
    if (peek().kind != Tok::Ident || peek().text != w) fail("expected '" + std::string(w) + "'");
    ++pos_;
  }

  void internal_only(const std::string& what, SourcePos pos) const {
    if (!opts_.allow_internal)
      throw FrontendError("SyntaxError", what + " is only allowed in generated code", pos.line, pos.column);
  }

  static bool is_keyword(const std::string& s) {
    return s == "int" || s == "if" || s == "else" || s == "while" || s == "return" || s == "assume" ||
           s == "assert" || s == "nondet";
  }

  std::string ident() {
    const Token& t = peek();
    if (t.kind != Tok::Ident || is_keyword(t.text)) fail("expected identifier");
    if (is_reserved(t.text) && !opts_.allow_internal)
      throw FrontendError("ReservedIdentifier", "names beginning with '__rv_' are reserved: " + t.text, t.pos.line,
                          t.pos.column);
    ++pos_;
    return t.text;
  }

  std::int64_t number() {
    const Token& t = peek();
    if (t.kind != Tok::Number) fail("expected number");
    ++pos_;
    try {
      std::size_t used = 0;
      bool hex = t.text.size() > 2 && t.text[0] == '0' && (t.text[1] == 'x' || t.text[1] == 'X');
      long long v = std::stoll(t.text, &used, hex ? 16 : 10);
      if (used != t.text.size()) throw std::invalid_argument(t.text);
      return v;
    } catch (const std::exception&) {
      throw FrontendError("SyntaxError", "bad integer literal '" + t.text + "'", t.pos.line, t.pos.column);
    }
  }

  StmtPtr block() {
    SourcePos pos = peek().pos;
    expect("{");
    std::vector<StmtPtr> stmts;
    while (!check("}")) {
      if (peek().kind == Tok::End) fail("expected '}'");
      stmts.push_back(stmt());
    }
    expect("}");
    return at(mk::block(std::move(stmts)), pos);
  }

  StmtPtr stmt() {
    SourcePos pos = peek().pos;
    if (check("{")) return block();
    if (peek().kind == Tok::Ident) {
      const std::string& w = peek().text;
      if (w == "int") {
        ++pos_;
        std::string name = ident();
        ExprPtr init;
        if (accept("=")) init = expr();
        expect(";");
        return at(mk::decl(name, init), pos);
      }
      if (w == "if") {
        ++pos_;
        expect("(");
        auto c = expr();
        expect(")");
        auto t = stmt();
        StmtPtr e;
        if (peek().kind == Tok::Ident && peek().text == "else") {
          ++pos_;
          e = stmt();
        }
        return at(mk::if_(c, t, e), pos);
      }
      if (w == "while") {
        ++pos_;
        expect("(");
        auto c = expr();
        expect(")");
        return at(mk::while_(c, stmt()), pos);
      }
      if (w == "return") {
        ++pos_;
        if (check("(") && opts_.allow_internal && is_tuple_ahead()) {
          expect("(");
          std::vector<ExprPtr> vals;
          do vals.push_back(expr());
          while (accept(","));
          expect(")");
          expect(";");
          max_slots_ = std::max<int>(max_slots_, static_cast<int>(vals.size()));
          return at(mk::ret_multi(std::move(vals)), pos);
        }
        auto v = expr();
        expect(";");
        return at(mk::ret(v), pos);
      }
      if (w == "assume" || w == "assert" || w == "__rv_assume") {
        internal_only(w, pos);
        ++pos_;
        expect("(");
        auto c = expr();
        expect(")");
        expect(";");
        if (w == "assert") return at(mk::assert_(c), pos);
        return at(mk::assume(c, w == "__rv_assume"), pos);
      }
      if (w == "__rv_record") {
        internal_only(w, pos);
        ++pos_;
        expect("(");
        int store = static_cast<int>(number());
        std::vector<ExprPtr> vals;
        while (accept(",")) vals.push_back(expr());
        expect(")");
        expect(";");
        return at(mk::record(store, std::move(vals)), pos);
      }
      if (peek(1).kind == Tok::Punct && peek(1).text == "=") {
        std::string target = ident();
        expect("=");
        auto v = expr();
        expect(";");
        return at(mk::assign(target, v), pos);
      }
    }
    if (check("(") && opts_.allow_internal && is_tuple_ahead()) {
      expect("(");
      std::vector<std::string> targets;
      do targets.push_back(ident());
      while (accept(","));
      expect(")");
      expect("=");
      auto c = expr();
      if (!std::holds_alternative<Call>(c->node)) fail("multi-assignment needs a call");
      expect(";");
      return at(mk::multi_assign(std::move(targets), c), pos);
    }
    auto e = expr();
    expect(";");
    if (!std::holds_alternative<Call>(e->node)) {
      throw FrontendError("SyntaxError", "expression statement must be a call", pos.line, pos.column);
    }
    return at(mk::expr_stmt(e), pos);
  }

  // Looks for a top-level comma inside the parenthesis that starts here.
  bool is_tuple_ahead() const {
    int depth = 0;
    for (std::size_t k = pos_; k < toks_.size(); ++k) {
      const Token& t = toks_[k];
      if (t.kind != Tok::Punct) continue;
      if (t.text == "(") ++depth;
      if (t.text == ")" && --depth == 0) return false;
      if (t.text == "," && depth == 1) return true;
      if (t.text == ";") return false;
    }
    return false;
  }

  struct BinLevel {
    std::vector<std::pair<std::string_view, BinaryOp>> ops;
  };

  static const std::vector<BinLevel>& levels() {
    static const std::vector<BinLevel> lv = {
        {{{"||", BinaryOp::LogOr}}},
        {{{"&&", BinaryOp::LogAnd}}},
        {{{"|", BinaryOp::BitOr}}},
        {{{"^", BinaryOp::BitXor}}},
        {{{"&", BinaryOp::BitAnd}}},
        {{{"==", BinaryOp::Eq}, {"!=", BinaryOp::Ne}}},
        {{{"<", BinaryOp::Lt}, {"<=", BinaryOp::Le}, {">", BinaryOp::Gt}, {">=", BinaryOp::Ge}}},
        {{{"+", BinaryOp::Add}, {"-", BinaryOp::Sub}}},
        {{{"*", BinaryOp::Mul}, {"/", BinaryOp::Div}, {"%", BinaryOp::Mod}}},
    };
    return lv;
  }

  ExprPtr expr() { return binary(0); }

  ExprPtr binary(std::size_t level) {
    if (level >= levels().size()) return unary();
    auto lhs = binary(level + 1);
    for (;;) {
      SourcePos pos = peek().pos;
      bool matched = false;
      if (peek().kind == Tok::Punct) {
        for (auto& [text, op] : levels()[level].ops) {
          if (peek().text == text) {
            ++pos_;
            auto rhs = binary(level + 1);
            lhs = at(mk::binary(op, lhs, rhs), pos);
            matched = true;
            break;
          }
        }
      }
      if (!matched) return lhs;
    }
  }

  ExprPtr unary() {
    SourcePos pos = peek().pos;
    if (accept("-")) {
      if (peek().kind == Tok::Number) return at(mk::lit(-number()), pos);
      return at(mk::unary(UnaryOp::Neg, unary()), pos);
    }
    if (accept("!")) return at(mk::unary(UnaryOp::LogNot, unary()), pos);
    if (accept("~")) return at(mk::unary(UnaryOp::BitNot, unary()), pos);
    return primary();
  }

  ExprPtr primary() {
    SourcePos pos = peek().pos;
    if (accept("(")) {
      auto e = expr();
      expect(")");
      return e;
    }
    if (peek().kind == Tok::Number) return at(mk::lit(number()), pos);
    if (peek().kind == Tok::Ident) {
      std::string w = peek().text;
      if (w == "nondet") {
        internal_only("nondet()", pos);
        ++pos_;
        expect("(");
        expect(")");
        return at(mk::nondet(), pos);
      }
      if (w == "__rv_leaves_equal" || w == "__rv_size_at_least") {
        internal_only(w, pos);
        ++pos_;
        expect("(");
        int a = static_cast<int>(number());
        expect(",");
        int b = static_cast<int>(number());
        expect(")");
        auto kind = w == "__rv_leaves_equal" ? IntrinsicKind::LeavesEqual : IntrinsicKind::SizeAtLeast;
        return at(mk::intrinsic(kind, a, b), pos);
      }
      std::string name = ident();
      if (accept("(")) {
        std::vector<ExprPtr> args;
        if (!check(")")) {
          do args.push_back(expr());
          while (accept(","));
        }
        expect(")");
        return at(mk::call(name, std::move(args)), pos);
      }
      return at(mk::var(name), pos);
    }
    fail("expected expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  ParseOptions opts_;
  int max_slots_ = 1;
};

}  // namespace

SourceUnit parse(std::string_view text, const ParseOptions& options) {
  Parser p(Lexer(text).run(), options);
  return p.unit();
}

ExprPtr parse_expr(std::string_view text, const ParseOptions& options) {
  Parser p(Lexer(text).run(), options);
  return p.expr_only();
}

SourceUnit parse_file(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw FrontendError("IoError", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), options);
}

}  // namespace recveq::lang
